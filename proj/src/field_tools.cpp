#include <map>

#include "pdmsym/field.hpp"

namespace pdm {

namespace {

bool is_zero(const FieldPtr& e) {
    return e->kind == FieldKind::Num && e->num == Rat(0);
}

bool is_one(const FieldPtr& e) {
    return e->kind == FieldKind::Num && e->num == Rat(1);
}

FieldPtr zero() { return f_num(Rat(0)); }

// Constructors that fold the 0/1 literals differentiation produces in bulk,
// so printed derivatives stay readable.
FieldPtr s_add(FieldPtr a, FieldPtr b) {
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return f_add(std::move(a), std::move(b));
}

FieldPtr s_sub(FieldPtr a, FieldPtr b) {
    if (is_zero(b)) return a;
    if (is_zero(a)) return f_neg(std::move(b));
    return f_sub(std::move(a), std::move(b));
}

FieldPtr s_mul(FieldPtr a, FieldPtr b) {
    if (is_zero(a) || is_zero(b)) return zero();
    if (is_one(a)) return b;
    if (is_one(b)) return a;
    return f_mul(std::move(a), std::move(b));
}

FieldPtr s_div(FieldPtr a, FieldPtr b) {
    if (is_zero(a)) return zero();
    if (is_one(b)) return a;
    return f_div(std::move(a), std::move(b));
}

FieldPtr s_neg(FieldPtr a) {
    if (is_zero(a)) return a;
    return f_neg(std::move(a));
}

FieldPtr x(int axis) { return f_name("x" + std::to_string(axis)); }

FieldPtr rt2() { return f_add(f_pow(x(1), 2), f_pow(x(2), 2)); }

FieldPtr r2() { return f_add(rt2(), f_pow(x(3), 2)); }

FieldPtr derived_derivative(const std::string& n, int axis) {
    if (n == "r") return s_div(x(axis), f_name("r"));
    if (n == "rt") {
        if (axis == 3) return zero();
        return s_div(x(axis), f_name("rt"));
    }
    if (n == "phi") {
        if (axis == 1) return f_neg(s_div(x(2), rt2()));
        if (axis == 2) return s_div(x(1), rt2());
        return zero();
    }
    // theta, colatitude from the positive x3 axis
    if (axis == 3) return f_neg(s_div(f_name("rt"), r2()));
    return s_div(s_mul(x(axis), x(3)), s_mul(f_name("rt"), r2()));
}

FieldPtr chain(const std::string& fn, const FieldPtr& u, FieldPtr du) {
    if (fn == "sqrt")
        return s_div(du, s_mul(f_num(Rat(2)), f_call("sqrt", {u})));
    if (fn == "exp") return s_mul(du, f_call("exp", {u}));
    if (fn == "ln") return s_div(du, u);
    if (fn == "sin") return s_mul(du, f_call("cos", {u}));
    if (fn == "cos") return s_neg(s_mul(du, f_call("sin", {u})));
    if (fn == "tan")
        return s_mul(du, s_add(f_num(Rat(1)), f_pow(f_call("tan", {u}), 2)));
    // atan
    return s_div(du, s_add(f_num(Rat(1)), f_pow(u, 2)));
}

FieldPtr deriv(const FieldPtr& e, int axis) {
    switch (e->kind) {
        case FieldKind::Num:
            return zero();
        case FieldKind::Name: {
            const std::string& n = e->name;
            if (n == "x1" || n == "x2" || n == "x3")
                return n == "x" + std::to_string(axis) ? f_num(Rat(1)) : zero();
            if (is_reserved_var(n)) return derived_derivative(n, axis);
            // remaining free names are bound parameters, constant by contract
            return zero();
        }
        case FieldKind::Call: {
            if (!is_builtin_func(e->name))
                throw EvalError("cannot differentiate unresolved slot '" + e->name +
                                "'; substitute slots first");
            return chain(e->name, e->kids[0], deriv(e->kids[0], axis));
        }
        case FieldKind::Neg:
            return s_neg(deriv(e->kids[0], axis));
        case FieldKind::Add:
            return s_add(deriv(e->kids[0], axis), deriv(e->kids[1], axis));
        case FieldKind::Sub:
            return s_sub(deriv(e->kids[0], axis), deriv(e->kids[1], axis));
        case FieldKind::Mul:
            return s_add(s_mul(deriv(e->kids[0], axis), e->kids[1]),
                         s_mul(e->kids[0], deriv(e->kids[1], axis)));
        case FieldKind::Div: {
            const auto& a = e->kids[0];
            const auto& b = e->kids[1];
            return s_div(s_sub(s_mul(deriv(a, axis), b), s_mul(a, deriv(b, axis))),
                         f_mul(b, b));
        }
        case FieldKind::Pow: {
            if (e->expo == 0) return zero();
            if (e->expo == 1) return deriv(e->kids[0], axis);
            FieldPtr base =
                e->expo == 2 ? e->kids[0] : f_pow(e->kids[0], e->expo - 1);
            return s_mul(s_mul(f_num(Rat(e->expo)), base), deriv(e->kids[0], axis));
        }
    }
    throw EvalError("unreachable field kind");
}

FieldPtr subst_names(const FieldPtr& e, const std::map<std::string, FieldPtr>& m) {
    switch (e->kind) {
        case FieldKind::Num:
            return e;
        case FieldKind::Name: {
            auto it = m.find(e->name);
            return it == m.end() ? e : it->second;
        }
        case FieldKind::Call: {
            std::vector<FieldPtr> ks;
            ks.reserve(e->kids.size());
            for (const auto& k : e->kids) ks.push_back(subst_names(k, m));
            return f_call(e->name, std::move(ks));
        }
        case FieldKind::Neg:
            return f_neg(subst_names(e->kids[0], m));
        case FieldKind::Add:
            return f_add(subst_names(e->kids[0], m), subst_names(e->kids[1], m));
        case FieldKind::Sub:
            return f_sub(subst_names(e->kids[0], m), subst_names(e->kids[1], m));
        case FieldKind::Mul:
            return f_mul(subst_names(e->kids[0], m), subst_names(e->kids[1], m));
        case FieldKind::Div:
            return f_div(subst_names(e->kids[0], m), subst_names(e->kids[1], m));
        case FieldKind::Pow:
            return f_pow(subst_names(e->kids[0], m), e->expo);
    }
    throw EvalError("unreachable field kind");
}

FieldPtr subst_slots(const FieldPtr& e, const Binding& b, int depth) {
    if (depth > 32) throw EvalError("slot recursion too deep");
    switch (e->kind) {
        case FieldKind::Num:
            return e;
        case FieldKind::Name: {
            auto it = b.slots.find(e->name);
            if (it == b.slots.end()) return e;
            if (!it->second.args.empty())
                throw EvalError("slot '" + e->name + "' used without arguments");
            return subst_slots(it->second.body, b, depth + 1);
        }
        case FieldKind::Call: {
            std::vector<FieldPtr> ks;
            ks.reserve(e->kids.size());
            for (const auto& k : e->kids) ks.push_back(subst_slots(k, b, depth));
            if (is_builtin_func(e->name)) return f_call(e->name, std::move(ks));
            auto it = b.slots.find(e->name);
            if (it == b.slots.end())
                throw EvalError("unbound slot '" + e->name + "'");
            const Slot& s = it->second;
            if (s.args.size() != ks.size())
                throw EvalError("slot '" + e->name + "' arity mismatch");
            std::map<std::string, FieldPtr> m;
            for (size_t i = 0; i < ks.size(); ++i) m[s.args[i]] = ks[i];
            return subst_slots(subst_names(s.body, m), b, depth + 1);
        }
        case FieldKind::Neg:
            return f_neg(subst_slots(e->kids[0], b, depth));
        case FieldKind::Add:
            return f_add(subst_slots(e->kids[0], b, depth),
                         subst_slots(e->kids[1], b, depth));
        case FieldKind::Sub:
            return f_sub(subst_slots(e->kids[0], b, depth),
                         subst_slots(e->kids[1], b, depth));
        case FieldKind::Mul:
            return f_mul(subst_slots(e->kids[0], b, depth),
                         subst_slots(e->kids[1], b, depth));
        case FieldKind::Div:
            return f_div(subst_slots(e->kids[0], b, depth),
                         subst_slots(e->kids[1], b, depth));
        case FieldKind::Pow:
            return f_pow(subst_slots(e->kids[0], b, depth), e->expo);
    }
    throw EvalError("unreachable field kind");
}

}  // namespace

FieldPtr field_derivative(const FieldPtr& e, int axis) { return deriv(e, axis); }

FieldPtr substitute_slots(const FieldPtr& e, const Binding& b) {
    return subst_slots(e, b, 0);
}

}  // namespace pdm
