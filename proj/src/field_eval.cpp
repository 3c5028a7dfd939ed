#include "pdmsym/field.hpp"

namespace pdm {

namespace {

template <class S>
constexpr bool is_float_mode = std::is_same_v<S, double>;

template <class S>
class Evaluator {
  public:
    Evaluator(const Binding& b, const std::array<S, 3>& pt, int ord)
        : b_(b), pt_(pt), ord_(ord) {}

    Jet<S> eval(const FieldPtr& e) { return rec(e, {}, 0); }

  private:
    const Binding& b_;
    const std::array<S, 3>& pt_;
    int ord_;

    using Env = std::map<std::string, Jet<S>>;

    Jet<S> var(int axis) { return jet_variable<S>(pt_, axis, ord_); }

    Jet<S> compose1(const Jet<S>& u, const char* fn) {
        if constexpr (is_float_mode<S>) {
            std::string f(fn);
            if (f == "sqrt") return jet_compose(u, series_sqrt(u.value(), u.ord));
            if (f == "exp") return jet_compose(u, series_exp(u.value(), u.ord));
            if (f == "ln") return jet_compose(u, series_ln(u.value(), u.ord));
            if (f == "sin") return jet_compose(u, series_sin(u.value(), u.ord));
            if (f == "cos") return jet_compose(u, series_cos(u.value(), u.ord));
            if (f == "atan") return jet_compose(u, series_atan(u.value(), u.ord));
            if (f == "tan")
                return jet_div(jet_compose(u, series_sin(u.value(), u.ord)),
                               jet_compose(u, series_cos(u.value(), u.ord)));
            throw EvalError(std::string("unknown function '") + fn + "'");
        } else {
            (void)u;
            throw EvalError(std::string("'") + fn + "' is not available in rational mode");
        }
    }

    Jet<S> derived(const std::string& n) {
        if constexpr (is_float_mode<S>) {
            auto sq = [&](const Jet<S>& a) { return jet_mul(a, a); };
            if (n == "r") {
                auto r2 = jet_add(jet_add(sq(var(1)), sq(var(2))), sq(var(3)));
                return compose1(r2, "sqrt");
            }
            if (n == "rt") {
                auto rt2 = jet_add(sq(var(1)), sq(var(2)));
                return compose1(rt2, "sqrt");
            }
            if (n == "phi") {
                auto x1 = var(1), x2 = var(2);
                if (x1.value() == 0.0) throw EvalError("phi is singular at x1 = 0");
                auto j = compose1(jet_div(x2, x1), "atan");
                j.c[0] = std::atan2(x2.value(), x1.value());
                return j;
            }
            // theta: colatitude from the positive x3 axis, smooth branch.
            auto rt = derived("rt");
            auto x3 = var(3);
            if (x3.value() == 0.0) throw EvalError("theta is singular at x3 = 0");
            auto j = compose1(jet_div(rt, x3), "atan");
            j.c[0] = std::atan2(rt.value(), x3.value());
            return j;
        } else {
            throw EvalError("'" + n + "' is not available in rational mode");
        }
    }

    Jet<S> rec(const FieldPtr& e, const Env& env, int depth) {
        if (depth > 64) throw EvalError("slot recursion too deep");
        switch (e->kind) {
            case FieldKind::Num:
                if constexpr (is_float_mode<S>)
                    return jet_const(rat_d(e->num), pt_, ord_);
                else
                    return jet_const(e->num, pt_, ord_);
            case FieldKind::Name: {
                const auto fit = env.find(e->name);
                if (fit != env.end()) return fit->second;
                if (e->name == "x1") return var(1);
                if (e->name == "x2") return var(2);
                if (e->name == "x3") return var(3);
                if (is_reserved_var(e->name)) return derived(e->name);
                const auto pit = b_.params.find(e->name);
                if (pit != b_.params.end()) {
                    if constexpr (is_float_mode<S>)
                        return jet_const(rat_d(pit->second), pt_, ord_);
                    else
                        return jet_const(pit->second, pt_, ord_);
                }
                const auto sit = b_.slots.find(e->name);
                if (sit != b_.slots.end()) {
                    if (!sit->second.args.empty())
                        throw EvalError("slot '" + e->name + "' needs arguments");
                    return rec(sit->second.body, {}, depth + 1);
                }
                throw EvalError("unbound name '" + e->name + "'");
            }
            case FieldKind::Call: {
                if (is_builtin_func(e->name))
                    return compose1(rec(e->kids[0], env, depth), e->name.c_str());
                const auto sit = b_.slots.find(e->name);
                if (sit == b_.slots.end())
                    throw EvalError("unbound slot '" + e->name + "'");
                if (sit->second.args.size() != e->kids.size())
                    throw EvalError("slot '" + e->name + "' arity mismatch");
                Env inner;
                for (size_t i = 0; i < e->kids.size(); ++i)
                    inner.emplace(sit->second.args[i], rec(e->kids[i], env, depth));
                return rec(sit->second.body, inner, depth + 1);
            }
            case FieldKind::Neg: return jet_neg(rec(e->kids[0], env, depth));
            case FieldKind::Add:
                return jet_add(rec(e->kids[0], env, depth), rec(e->kids[1], env, depth));
            case FieldKind::Sub:
                return jet_sub(rec(e->kids[0], env, depth), rec(e->kids[1], env, depth));
            case FieldKind::Mul:
                return jet_mul(rec(e->kids[0], env, depth), rec(e->kids[1], env, depth));
            case FieldKind::Div:
                return jet_div(rec(e->kids[0], env, depth), rec(e->kids[1], env, depth));
            case FieldKind::Pow: return jet_pow(rec(e->kids[0], env, depth), e->expo);
        }
        throw EvalError("corrupt expression node");
    }
};

}  // namespace

template <class S>
Jet<S> eval_field(const FieldPtr& e, const Binding& b, const std::array<S, 3>& point,
                  int order) {
    return Evaluator<S>(b, point, order).eval(e);
}

template Jet<double> eval_field<double>(const FieldPtr&, const Binding&,
                                        const std::array<double, 3>&, int);
template Jet<Rat> eval_field<Rat>(const FieldPtr&, const Binding&,
                                  const std::array<Rat, 3>&, int);

}  // namespace pdm
