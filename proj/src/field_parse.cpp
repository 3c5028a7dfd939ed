#include <cctype>

#include "pdmsym/field.hpp"

namespace pdm {

FieldPtr f_num(Rat v) {
    auto e = std::make_shared<FieldExpr>();
    e->kind = FieldKind::Num;
    e->num = std::move(v);
    return e;
}
FieldPtr f_name(std::string n) {
    auto e = std::make_shared<FieldExpr>();
    e->kind = FieldKind::Name;
    e->name = std::move(n);
    return e;
}
FieldPtr f_call(std::string n, std::vector<FieldPtr> args) {
    auto e = std::make_shared<FieldExpr>();
    e->kind = FieldKind::Call;
    e->name = std::move(n);
    e->kids = std::move(args);
    return e;
}
static FieldPtr node(FieldKind k, std::vector<FieldPtr> kids) {
    auto e = std::make_shared<FieldExpr>();
    e->kind = k;
    e->kids = std::move(kids);
    return e;
}
FieldPtr f_neg(FieldPtr a) { return node(FieldKind::Neg, {std::move(a)}); }
FieldPtr f_add(FieldPtr a, FieldPtr b) { return node(FieldKind::Add, {std::move(a), std::move(b)}); }
FieldPtr f_sub(FieldPtr a, FieldPtr b) { return node(FieldKind::Sub, {std::move(a), std::move(b)}); }
FieldPtr f_mul(FieldPtr a, FieldPtr b) { return node(FieldKind::Mul, {std::move(a), std::move(b)}); }
FieldPtr f_div(FieldPtr a, FieldPtr b) {
    // Exact constant folding keeps "p/q" literals a single rational.
    if (a->kind == FieldKind::Num && b->kind == FieldKind::Num) {
        if (b->num == 0) return node(FieldKind::Div, {std::move(a), std::move(b)});
        return f_num(a->num / b->num);
    }
    return node(FieldKind::Div, {std::move(a), std::move(b)});
}
FieldPtr f_pow(FieldPtr a, int e) {
    auto n = node(FieldKind::Pow, {std::move(a)});
    const_cast<FieldExpr*>(n.get())->expo = e;
    return n;
}

bool is_reserved_var(const std::string& n) {
    return n == "x1" || n == "x2" || n == "x3" || n == "r" || n == "rt" || n == "phi" ||
           n == "theta";
}
bool is_builtin_func(const std::string& n) {
    return n == "sqrt" || n == "exp" || n == "ln" || n == "sin" || n == "cos" ||
           n == "tan" || n == "atan";
}

namespace {

class Parser {
  public:
    explicit Parser(const std::string& src) : s_(src) {}

    FieldPtr run() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError(pos_, "empty expression");
        FieldPtr e = expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(pos_, "trailing input");
        return e;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    FieldPtr expr() {
        FieldPtr e = term();
        for (;;) {
            if (eat('+'))
                e = f_add(e, term());
            else if (eat('-'))
                e = f_sub(e, term());
            else
                return e;
        }
    }

    FieldPtr term() {
        FieldPtr e = factor();
        for (;;) {
            if (eat('*'))
                e = f_mul(e, factor());
            else if (eat('/'))
                e = f_div(e, factor());
            else
                return e;
        }
    }

    FieldPtr factor() {
        if (eat('-')) return f_neg(factor());
        FieldPtr a = atom();
        if (eat('^')) return f_pow(a, integer());
        return a;
    }

    int integer() {
        skip_ws();
        const size_t start = pos_;
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            neg = s_[pos_] == '-';
            ++pos_;
        }
        if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
            throw ParseError(pos_, "expected integer exponent");
        long v = 0;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
            v = v * 10 + (s_[pos_] - '0');
            if (v > 1000000) throw ParseError(start, "exponent too large");
            ++pos_;
        }
        return static_cast<int>(neg ? -v : v);
    }

    FieldPtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) throw ParseError(pos_, "expected expression");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name_or_call();
        if (c == '(') {
            ++pos_;
            FieldPtr e = expr();
            if (!eat(')')) throw ParseError(pos_, "expected ')'");
            return e;
        }
        throw ParseError(pos_, "expected expression");
    }

    FieldPtr number() {
        std::string digits;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
            digits += s_[pos_++];
        if (pos_ < s_.size() && s_[pos_] == '.')
            throw ParseError(pos_, "decimal literals not supported; use p/q");
        return f_num(parse_rat(digits));
    }

    FieldPtr name_or_call() {
        const size_t start = pos_;
        std::string id;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            id += s_[pos_++];
        if (peek() != '(') return f_name(id);
        if (is_reserved_var(id)) throw ParseError(start, "'" + id + "' is not a function");
        ++pos_;  // consume '('
        std::vector<FieldPtr> args;
        args.push_back(expr());
        while (eat(',')) args.push_back(expr());
        if (!eat(')')) throw ParseError(pos_, "expected ')'");
        if (is_builtin_func(id) && args.size() != 1)
            throw ParseError(start, "'" + id + "' takes one argument");
        return f_call(id, std::move(args));
    }
};

int precedence(FieldKind k) {
    switch (k) {
        case FieldKind::Add:
        case FieldKind::Sub: return 1;
        case FieldKind::Mul:
        case FieldKind::Div: return 2;
        case FieldKind::Neg: return 3;
        case FieldKind::Pow: return 4;
        default: return 5;
    }
}

void print_rec(const FieldPtr& e, int parent_prec, bool rhs, std::string& out) {
    const int prec = precedence(e->kind);
    const bool parens =
        prec < parent_prec || (prec == parent_prec && rhs && parent_prec != 5);
    if (parens) out += '(';
    switch (e->kind) {
        case FieldKind::Num:
            if (e->num < 0) {
                out += "(" + rat_str(e->num) + ")";
            } else {
                out += rat_str(e->num);
            }
            break;
        case FieldKind::Name: out += e->name; break;
        case FieldKind::Call:
            out += e->name;
            out += '(';
            for (size_t i = 0; i < e->kids.size(); ++i) {
                if (i) out += ", ";
                print_rec(e->kids[i], 0, false, out);
            }
            out += ')';
            break;
        case FieldKind::Neg:
            out += '-';
            print_rec(e->kids[0], precedence(FieldKind::Neg), true, out);
            break;
        case FieldKind::Add:
            print_rec(e->kids[0], 1, false, out);
            out += " + ";
            print_rec(e->kids[1], 1, true, out);
            break;
        case FieldKind::Sub:
            print_rec(e->kids[0], 1, false, out);
            out += " - ";
            print_rec(e->kids[1], 1, true, out);
            break;
        case FieldKind::Mul:
            print_rec(e->kids[0], 2, false, out);
            out += "*";
            print_rec(e->kids[1], 2, true, out);
            break;
        case FieldKind::Div:
            print_rec(e->kids[0], 2, false, out);
            out += "/";
            print_rec(e->kids[1], 2, true, out);
            break;
        case FieldKind::Pow:
            print_rec(e->kids[0], 4, true, out);
            out += "^";
            out += std::to_string(e->expo);
            break;
    }
    if (parens) out += ')';
}

}  // namespace

FieldPtr parse_field(const std::string& src) { return Parser(src).run(); }

std::string print_field(const FieldPtr& e) {
    std::string out;
    print_rec(e, 0, false, out);
    return out;
}

bool field_equal(const FieldPtr& a, const FieldPtr& b) {
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case FieldKind::Num: return a->num == b->num;
        case FieldKind::Name: return a->name == b->name;
        case FieldKind::Pow:
            if (a->expo != b->expo) return false;
            break;
        case FieldKind::Call:
            if (a->name != b->name) return false;
            break;
        default: break;
    }
    if (a->kids.size() != b->kids.size()) return false;
    for (size_t i = 0; i < a->kids.size(); ++i)
        if (!field_equal(a->kids[i], b->kids[i])) return false;
    return true;
}

namespace {

void collect_free(const FieldPtr& e, const Binding* b, int depth,
                  std::set<std::string>& params, std::set<std::string>& slots) {
    if (depth > 64) throw EvalError("slot recursion too deep");
    switch (e->kind) {
        case FieldKind::Name:
            if (is_reserved_var(e->name)) return;
            if (b) {
                if (b->params.count(e->name)) return;
                const auto it = b->slots.find(e->name);
                if (it != b->slots.end()) {
                    if (it->second.args.empty())
                        collect_free(it->second.body, b, depth + 1, params, slots);
                    return;
                }
            }
            params.insert(e->name);
            return;
        case FieldKind::Call:
            if (!is_builtin_func(e->name)) {
                bool bound = false;
                if (b) {
                    const auto it = b->slots.find(e->name);
                    if (it != b->slots.end()) {
                        bound = true;
                        // Formal args are bound by the application; the rest of
                        // the body resolves against the same binding.
                        std::set<std::string> bp, bs;
                        collect_free(it->second.body, b, depth + 1, bp, bs);
                        for (const auto& n : it->second.args) bp.erase(n);
                        params.insert(bp.begin(), bp.end());
                        slots.insert(bs.begin(), bs.end());
                    }
                }
                if (!bound) slots.insert(e->name);
            }
            break;
        default: break;
    }
    for (const auto& k : e->kids) collect_free(k, b, depth, params, slots);
}

}  // namespace

std::pair<std::set<std::string>, std::set<std::string>> free_names(const FieldPtr& e) {
    std::set<std::string> p, s;
    collect_free(e, nullptr, 0, p, s);
    return {p, s};
}

std::pair<std::set<std::string>, std::set<std::string>> free_names(const FieldPtr& e,
                                                                   const Binding& b) {
    std::set<std::string> p, s;
    collect_free(e, &b, 0, p, s);
    return {p, s};
}

}  // namespace pdm
