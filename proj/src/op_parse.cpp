#include <cctype>

#include "pdmsym/op.hpp"

namespace pdm {

namespace {

// Operator-expression parser. Scalars (i, rationals, bound parameters) are
// order-0 constant operators, so the algebra layer handles all combination
// rules; field(...) and the first argument of dot(...) delegate to the field
// grammar.
class OpParser {
  public:
    OpParser(const std::string& src, const OpEnv& env) : src_(src), env_(env) {
        if (!env_.binding) binding_ = std::make_shared<const Binding>();
    }

    DiffOperator parse() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "empty operator expression");
        DiffOperator r = expr();
        skip_ws();
        if (pos_ < src_.size()) throw ParseError(pos_, "trailing input");
        return r;
    }

  private:
    const std::string& src_;
    const OpEnv& env_;
    std::shared_ptr<const Binding> binding_;
    size_t pos_ = 0;

    const std::shared_ptr<const Binding>& binding() const {
        return env_.binding ? env_.binding : binding_;
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!eat(c)) throw ParseError(pos_, std::string("expected ") + what);
    }

    DiffOperator expr() {
        DiffOperator r = term();
        for (;;) {
            if (eat('+'))
                r = op_add(r, term());
            else if (eat('-'))
                r = op_sub(r, term());
            else
                return r;
        }
    }

    DiffOperator term() {
        DiffOperator r = factor();
        while (eat('*')) r = op_mul(r, factor());
        return r;
    }

    DiffOperator factor() {
        if (eat('-')) return op_neg(factor());
        DiffOperator r = atom();
        skip_ws();
        if (eat('^')) {
            const long e = integer("exponent");
            if (e < 1) throw ParseError(pos_, "exponent must be positive");
            DiffOperator p = r;
            for (long k = 1; k < e; ++k) p = op_mul(p, r);
            r = std::move(p);
        }
        return r;
    }

    long integer(const char* what) {
        skip_ws();
        const size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
            ++pos_;
        if (pos_ == start)
            throw ParseError(start, std::string("expected ") + what);
        return std::stol(src_.substr(start, pos_ - start));
    }

    // Extracts the substring up to the next top-level occurrence of stop
    // (',' or ')'), for handing to the field parser.
    std::string field_argument(char stop) {
        skip_ws();
        const size_t start = pos_;
        int depth = 0;
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (c == '(') {
                ++depth;
            } else if (c == ')') {
                if (depth == 0) break;
                --depth;
            } else if (c == stop && depth == 0) {
                break;
            }
            ++pos_;
        }
        if (pos_ >= src_.size())
            throw ParseError(pos_, std::string("unterminated argument, expected '") +
                                       stop + "'");
        std::string s = src_.substr(start, pos_ - start);
        try {
            parse_field(s);
        } catch (const ParseError& e) {
            throw ParseError(start + e.offset, "in field argument: " +
                                                   std::string(e.what()));
        }
        return s;
    }

    DiffOperator atom() {
        skip_ws();
        if (pos_ >= src_.size()) throw ParseError(pos_, "expected operator");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            DiffOperator r = expr();
            expect(')', "')'");
            return r;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            const long num = integer("number");
            skip_ws();
            if (pos_ < src_.size() && src_[pos_] == '/') {
                ++pos_;
                const long den = integer("denominator");
                if (den == 0) throw ParseError(pos_, "zero denominator");
                return op_const(CRat(rat(num, den), Rat(0)));
            }
            return op_const(CRat(Rat(num), Rat(0)));
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name_atom();
        throw ParseError(pos_, std::string("unexpected '") + c + "'");
    }

    DiffOperator name_atom() {
        const size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string name = src_.substr(start, pos_ - start);
        if (name == "i") return op_const(CRat::i());
        if (name == "anti") {
            expect('{', "'{' after anti");
            DiffOperator a = expr();
            expect(',', "','");
            DiffOperator b = expr();
            expect('}', "'}'");
            return anticommutator(a, b);
        }
        if (name == "dot") {
            expect('(', "'(' after dot");
            const std::string n = field_argument(',');
            expect(',', "','");
            DiffOperator a = expr();
            expect(')', "')'");
            return conjugate_sqrt(parse_field(n), a, binding());
        }
        if (name == "field") {
            expect('(', "'(' after field");
            const std::string f = field_argument(')');
            expect(')', "')'");
            return op_mult(Coeff::from_field(parse_field(f), binding()));
        }
        if (name == "H") {
            if (!env_.hamiltonian)
                throw ParseError(start, "'H' is not bound in this context");
            return *env_.hamiltonian;
        }
        if (auto g = generator_from_name(name)) return op_from_generator(*g);
        if (auto it = env_.named.find(name); it != env_.named.end())
            return it->second;
        if (const Binding& b = *binding(); b.params.count(name))
            return op_const(CRat(b.params.at(name), Rat(0)));
        throw ParseError(start, "unknown name '" + name + "'");
    }
};

}  // namespace

const std::vector<P3d>& realness_gate_points() {
    static const std::vector<P3d> pts = {
        {43.0 / 64, -55.0 / 64, 29.0 / 64},  {-37.0 / 64, 51.0 / 64, -61.0 / 64},
        {23.0 / 64, 33.0 / 64, 47.0 / 64},   {-59.0 / 64, -21.0 / 64, 39.0 / 64},
        {31.0 / 64, -45.0 / 64, -53.0 / 64}, {49.0 / 64, 27.0 / 64, -35.0 / 64},
        {-25.0 / 64, -41.0 / 64, -57.0 / 64}, {63.0 / 64, 19.0 / 64, 37.0 / 64}};
    return pts;
}

DiffOperator parse_operator(const std::string& src, const OpEnv& env) {
    DiffOperator r = OpParser(src, env).parse();

    // Realness gate: the result must be formally self-adjoint at generic
    // sample points (singular points of the entry are skipped).
    const DiffOperator diff = op_sub(r, adjoint(r));
    std::vector<P3d> usable;
    double worst = 0.0;
    P3d worst_pt{};
    double scale = 0.0;
    for (const P3d& p : realness_gate_points()) {
        try {
            double d = 0.0, n = 0.0;
            for (const Coeff& c : diff.comps()) {
                if (c.is_zero()) continue;
                const CJet<double> v = c.eval(p, 0);
                d = std::max(d, std::hypot(v.re.value(), v.im.value()));
            }
            for (const Coeff& c : r.comps()) {
                if (c.is_zero()) continue;
                const CJet<double> v = c.eval(p, 0);
                n = std::max(n, std::hypot(v.re.value(), v.im.value()));
            }
            usable.push_back(p);
            scale = std::max(scale, n);
            if (d > worst) {
                worst = d;
                worst_pt = p;
            }
        } catch (const EvalError&) {
            continue;
        }
    }
    if (usable.size() < 3)
        throw EvalError("realness check could not evaluate the operator at "
                        "enough sample points");
    if (worst > 1e-8 * (1.0 + scale))
        throw EvalError("operator fails the realness check: adjoint defect " +
                        std::to_string(worst) + " at (" +
                        std::to_string(worst_pt[0]) + ", " +
                        std::to_string(worst_pt[1]) + ", " +
                        std::to_string(worst_pt[2]) + ")");
    return r;
}

}  // namespace pdm
