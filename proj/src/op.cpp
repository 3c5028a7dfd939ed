#include "pdmsym/op.hpp"

#include <cmath>

namespace pdm {

namespace {

const Coeff kZeroCoeff;

MIdx unit(int axis) {
    MIdx m;
    (axis == 1 ? m.i1 : axis == 2 ? m.i2 : m.i3) = 1;
    return m;
}

MIdx midx_add(const MIdx& a, const MIdx& b) {
    return {a.i1 + b.i1, a.i2 + b.i2, a.i3 + b.i3};
}

MIdx midx_sub(const MIdx& a, const MIdx& b) {
    return {a.i1 - b.i1, a.i2 - b.i2, a.i3 - b.i3};
}

bool midx_leq(const MIdx& a, const MIdx& b) {
    return a.i1 <= b.i1 && a.i2 <= b.i2 && a.i3 <= b.i3;
}

Coeff cf_deriv_multi(Coeff c, const MIdx& g) {
    for (int axis = 1; axis <= 3; ++axis)
        for (int t = 0; t < g[axis - 1]; ++t) c = c.deriv(axis);
    return c;
}

CRat crat_int(std::int64_t k) { return CRat(Rat(static_cast<long>(k)), Rat(0)); }

double point_norm(const DiffOperator& a, const P3d& p) {
    double m = 0.0;
    for (const Coeff& c : a.comps()) {
        if (c.is_zero()) continue;
        CJet<double> v = c.eval(p, 0);
        m = std::max(m, std::hypot(v.re.value(), v.im.value()));
    }
    return m;
}

void check_certs(const DiffOperator& a, const P3d& p) {
    for (const auto& cert : a.certs) {
        const double scale =
            (1.0 + point_norm(*cert.a, p)) * (1.0 + point_norm(*cert.b, p));
        for (const Coeff& c : cert.vanishing) {
            CJet<double> v = c.eval(p, 0);
            if (std::hypot(v.re.value(), v.im.value()) > 1e-12 * scale)
                throw std::logic_error(
                    "operator algebra error: order-4 commutator coefficients "
                    "fail to cancel");
        }
    }
}

void check_certs(const DiffOperator& a, const P3q& p) {
    for (const auto& cert : a.certs)
        for (const Coeff& c : cert.vanishing) {
            CJet<Rat> v = c.eval(p, 0);
            if (v.re.value() != 0 || v.im.value() != 0)
                throw std::logic_error(
                    "operator algebra error: order-4 commutator coefficients "
                    "fail to cancel");
        }
}

}  // namespace

std::optional<Generator> generator_from_name(const std::string& name) {
    static const std::map<std::string, Generator> table = {
        {"P1", Generator::P1}, {"P2", Generator::P2}, {"P3", Generator::P3},
        {"L1", Generator::L1}, {"L2", Generator::L2}, {"L3", Generator::L3},
        {"D", Generator::D},   {"K1", Generator::K1}, {"K2", Generator::K2},
        {"K3", Generator::K3}};
    auto it = table.find(name);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

const Coeff& DiffOperator::coeff(const MIdx& alpha) const {
    if (alpha.deg() > ord_) return kZeroCoeff;
    return comp_[OrderTable::get(ord_).index_of(alpha)];
}

void DiffOperator::set_coeff(const MIdx& alpha, Coeff c) {
    if (alpha.deg() > kMaxOpOrder)
        throw std::invalid_argument("operator order exceeds 4");
    if (alpha.deg() > ord_) {
        ord_ = alpha.deg();
        comp_.resize(OrderTable::get(ord_).size());
    }
    comp_[OrderTable::get(ord_).index_of(alpha)] = std::move(c);
}

bool DiffOperator::rational_capable() const {
    for (const Coeff& c : comp_)
        if (!c.is_zero() && !c.rational_capable()) return false;
    return true;
}

void DiffOperator::normalize_order() {
    while (ord_ > 0) {
        const OrderTable& t = OrderTable::get(ord_);
        const OrderTable& below = OrderTable::get(ord_ - 1);
        bool top_zero = true;
        for (int k = below.size(); k < t.size(); ++k)
            if (!comp_[k].is_zero()) {
                top_zero = false;
                break;
            }
        if (!top_zero) break;
        comp_.resize(below.size());
        --ord_;
    }
}

DiffOperator op_identity() { return op_const(CRat(Rat(1), Rat(0))); }

DiffOperator op_const(const CRat& c) { return op_mult(Coeff::constant(c)); }

DiffOperator op_mult(Coeff c) {
    DiffOperator r;
    r.set_coeff(MIdx{}, std::move(c));
    return r;
}

DiffOperator op_add(const DiffOperator& a, const DiffOperator& b) {
    DiffOperator r;
    const int ord = std::max(a.order(), b.order());
    const OrderTable& t = OrderTable::get(ord);
    for (int k = 0; k < t.size(); ++k) {
        const MIdx& m = t.midx(k);
        Coeff c = cf_add(a.coeff(m), b.coeff(m));
        if (!c.is_zero()) r.set_coeff(m, std::move(c));
    }
    r.certs = a.certs;
    r.certs.insert(r.certs.end(), b.certs.begin(), b.certs.end());
    return r;
}

DiffOperator op_sub(const DiffOperator& a, const DiffOperator& b) {
    return op_add(a, op_neg(b));
}

DiffOperator op_neg(const DiffOperator& a) {
    return op_scale(a, CRat(Rat(-1), Rat(0)));
}

DiffOperator op_scale(const DiffOperator& a, const CRat& s) {
    DiffOperator r;
    const OrderTable& t = OrderTable::get(a.order());
    for (int k = 0; k < t.size(); ++k) {
        Coeff c = cf_scale(a.comps()[k], s);
        if (!c.is_zero()) r.set_coeff(t.midx(k), std::move(c));
    }
    if (!s.is_zero()) r.certs = a.certs;
    return r;
}

DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b) {
    if (a.order() + b.order() > kMaxOpOrder)
        throw std::invalid_argument("operator product order exceeds 4");
    const OrderTable& ta = OrderTable::get(a.order());
    const OrderTable& tb = OrderTable::get(b.order());
    const OrderTable& tr = OrderTable::get(a.order() + b.order());
    std::vector<Coeff> acc(tr.size());
    for (int ia = 0; ia < ta.size(); ++ia) {
        const Coeff& ca = a.comps()[ia];
        if (ca.is_zero()) continue;
        const MIdx& alpha = ta.midx(ia);
        for (int ib = 0; ib < tb.size(); ++ib) {
            const Coeff& cb = b.comps()[ib];
            if (cb.is_zero()) continue;
            const MIdx& beta = tb.midx(ib);
            // coeff of d^(alpha-gamma+beta) gains C(alpha,gamma) a_alpha
            // d^gamma(b_beta) for every gamma <= alpha.
            for (int g1 = 0; g1 <= alpha.i1; ++g1)
                for (int g2 = 0; g2 <= alpha.i2; ++g2)
                    for (int g3 = 0; g3 <= alpha.i3; ++g3) {
                        const MIdx gamma{g1, g2, g3};
                        const MIdx delta =
                            midx_add(midx_sub(alpha, gamma), beta);
                        Coeff term = cf_mul(ca, cf_deriv_multi(cb, gamma));
                        term = cf_scale(term,
                                        crat_int(OrderTable::binom(alpha, gamma)));
                        const int k = tr.index_of(delta);
                        acc[k] = cf_add(acc[k], std::move(term));
                    }
        }
    }
    DiffOperator r;
    for (int k = 0; k < tr.size(); ++k)
        if (!acc[k].is_zero()) r.set_coeff(tr.midx(k), std::move(acc[k]));
    return r;
}

DiffOperator anticommutator(const DiffOperator& a, const DiffOperator& b) {
    return op_add(op_mul(a, b), op_mul(b, a));
}

DiffOperator commutator(const DiffOperator& a, const DiffOperator& b) {
    if (a.order() > 2 || b.order() > 2)
        throw std::invalid_argument("commutator arguments must have order <= 2");
    DiffOperator full = op_sub(op_mul(a, b), op_mul(b, a));
    DiffOperator r;
    DiffOperator::Certificate cert{{},
                                   std::make_shared<const DiffOperator>(a),
                                   std::make_shared<const DiffOperator>(b)};
    const OrderTable& t = OrderTable::get(full.order());
    for (int k = 0; k < t.size(); ++k) {
        const MIdx& m = t.midx(k);
        const Coeff& c = full.comps()[k];
        if (c.is_zero()) continue;
        if (m.deg() > 3)
            cert.vanishing.push_back(c);
        else
            r.set_coeff(m, c);
    }
    r.normalize_order();
    r.certs = full.certs;
    if (!cert.vanishing.empty()) r.certs.push_back(std::move(cert));
    return r;
}

namespace {

Coeff poly_coeff(const std::string& src) {
    static const auto empty = std::make_shared<const Binding>();
    return Coeff::from_field(parse_field(src), empty);
}

}  // namespace

DiffOperator op_from_generator(Generator g) {
    const CRat mi = CRat::i(-1), pi = CRat::i(1);
    DiffOperator r;
    switch (g) {
        case Generator::P1:
            r.set_coeff(unit(1), Coeff::constant(mi));
            break;
        case Generator::P2:
            r.set_coeff(unit(2), Coeff::constant(mi));
            break;
        case Generator::P3:
            r.set_coeff(unit(3), Coeff::constant(mi));
            break;
        case Generator::L1:
            r.set_coeff(unit(3), cf_scale(poly_coeff("x2"), mi));
            r.set_coeff(unit(2), cf_scale(poly_coeff("x3"), pi));
            break;
        case Generator::L2:
            r.set_coeff(unit(1), cf_scale(poly_coeff("x3"), mi));
            r.set_coeff(unit(3), cf_scale(poly_coeff("x1"), pi));
            break;
        case Generator::L3:
            r.set_coeff(unit(2), cf_scale(poly_coeff("x1"), mi));
            r.set_coeff(unit(1), cf_scale(poly_coeff("x2"), pi));
            break;
        case Generator::D:
            for (int a = 1; a <= 3; ++a)
                r.set_coeff(unit(a),
                            cf_scale(poly_coeff("x" + std::to_string(a)), mi));
            r.set_coeff(MIdx{}, Coeff::constant(CRat(Rat(0), rat(-3, 2))));
            break;
        case Generator::K1:
        case Generator::K2:
        case Generator::K3: {
            const int a = g == Generator::K1 ? 1 : g == Generator::K2 ? 2 : 3;
            const std::string xa = "x" + std::to_string(a);
            for (int b = 1; b <= 3; ++b) {
                const std::string xb = "x" + std::to_string(b);
                if (a == b) {
                    // i (2 xa^2 - r^2)
                    std::string s = xa + "^2";
                    for (int c = 1; c <= 3; ++c)
                        if (c != a) s += "-x" + std::to_string(c) + "^2";
                    r.set_coeff(unit(b), cf_scale(poly_coeff(s), pi));
                } else {
                    r.set_coeff(unit(b),
                                cf_scale(poly_coeff(xa + "*" + xb), CRat::i(2)));
                }
            }
            r.set_coeff(MIdx{}, cf_scale(poly_coeff(xa), CRat::i(3)));
            break;
        }
    }
    return r;
}

DiffOperator hamiltonian(FieldPtr f, FieldPtr v, std::shared_ptr<const Binding> b) {
    if (!b) b = std::make_shared<const Binding>();
    const Coeff fc = Coeff::from_field(f, b);
    const Coeff vc = v ? Coeff::from_field(v, b) : Coeff();
    DiffOperator h;
    const Coeff neg_f = cf_neg(fc);
    Coeff lap, grad2;
    for (int a = 1; a <= 3; ++a) {
        const Coeff fa = fc.deriv(a);
        h.set_coeff(midx_add(unit(a), unit(a)), neg_f);
        h.set_coeff(unit(a), cf_neg(fa));
        lap = cf_add(lap, fa.deriv(a));
        grad2 = cf_add(grad2, cf_mul(fa, fa));
    }
    Coeff zeroth = cf_sub(vc, cf_scale(lap, CRat(rat(1, 2), Rat(0))));
    zeroth = cf_add(zeroth, cf_div(grad2, cf_scale(fc, crat_int(4))));
    h.set_coeff(MIdx{}, std::move(zeroth));
    return h;
}

DiffOperator hamiltonian_alt(FieldPtr f, FieldPtr vhat,
                             std::shared_ptr<const Binding> b) {
    if (!b) b = std::make_shared<const Binding>();
    const Coeff fc = Coeff::from_field(f, b);
    DiffOperator h;
    for (int a = 1; a <= 3; ++a) {
        h.set_coeff(midx_add(unit(a), unit(a)), cf_neg(fc));
        h.set_coeff(unit(a), cf_neg(fc.deriv(a)));
    }
    if (vhat) h.set_coeff(MIdx{}, Coeff::from_field(vhat, b));
    return h;
}

DiffOperator conjugate_sqrt(FieldPtr n, const DiffOperator& a,
                            std::shared_ptr<const Binding> b) {
    if (a.order() > 2)
        throw std::invalid_argument("conjugate_sqrt needs order(A) <= 2");
    if (!b) b = std::make_shared<const Binding>();
    const Coeff nc = Coeff::from_field(n, b);

    // u d^gamma u for u = sqrt(N), |gamma| <= 2, written in N alone so the
    // expansion is valid wherever N is nonzero (either sign).
    auto pair_term = [&](const MIdx& g) -> Coeff {
        if (g.deg() == 0) return nc;
        int first = 0, second = 0;
        for (int axis = 1; axis <= 3; ++axis)
            for (int t = 0; t < g[axis - 1]; ++t) (first ? second : first) = axis;
        if (g.deg() == 1) return cf_scale(nc.deriv(first), CRat(rat(1, 2), Rat(0)));
        Coeff r = cf_scale(nc.deriv(first).deriv(second), CRat(rat(1, 2), Rat(0)));
        const Coeff cross = cf_mul(nc.deriv(first), nc.deriv(second));
        return cf_sub(r, cf_div(cross, cf_scale(nc, crat_int(4))));
    };

    const OrderTable& t = OrderTable::get(a.order());
    DiffOperator r;
    std::vector<Coeff> acc(t.size());
    for (int ia = 0; ia < t.size(); ++ia) {
        const Coeff& ca = a.comps()[ia];
        if (ca.is_zero()) continue;
        const MIdx& alpha = t.midx(ia);
        for (int b1 = 0; b1 <= alpha.i1; ++b1)
            for (int b2 = 0; b2 <= alpha.i2; ++b2)
                for (int b3 = 0; b3 <= alpha.i3; ++b3) {
                    const MIdx beta{b1, b2, b3};
                    Coeff term = cf_mul(ca, pair_term(midx_sub(alpha, beta)));
                    term = cf_scale(term,
                                    crat_int(OrderTable::binom(alpha, beta)));
                    const int k = t.index_of(beta);
                    acc[k] = cf_add(acc[k], std::move(term));
                }
    }
    for (int k = 0; k < t.size(); ++k)
        if (!acc[k].is_zero()) r.set_coeff(t.midx(k), std::move(acc[k]));
    return r;
}

DiffOperator adjoint(const DiffOperator& a) {
    const OrderTable& t = OrderTable::get(a.order());
    DiffOperator r;
    for (int kb = 0; kb < t.size(); ++kb) {
        const MIdx& beta = t.midx(kb);
        Coeff acc;
        for (int ka = 0; ka < t.size(); ++ka) {
            const Coeff& ca = a.comps()[ka];
            if (ca.is_zero()) continue;
            const MIdx& alpha = t.midx(ka);
            if (!midx_leq(beta, alpha)) continue;
            Coeff term = cf_deriv_multi(cf_conj(ca), midx_sub(alpha, beta));
            const std::int64_t sign = alpha.deg() % 2 ? -1 : 1;
            term = cf_scale(term,
                            crat_int(sign * OrderTable::binom(alpha, beta)));
            acc = cf_add(acc, std::move(term));
        }
        if (!acc.is_zero()) r.set_coeff(beta, std::move(acc));
    }
    r.normalize_order();
    return r;
}

double op_norm(const DiffOperator& a, const std::vector<P3d>& pts) {
    double m = 0.0;
    for (const P3d& p : pts) {
        check_certs(a, p);
        m = std::max(m, point_norm(a, p));
    }
    return m;
}

bool op_exact_zero(const DiffOperator& a, const std::vector<P3q>& pts) {
    for (const P3q& p : pts) {
        check_certs(a, p);
        for (const Coeff& c : a.comps()) {
            if (c.is_zero()) continue;
            CJet<Rat> v = c.eval(p, 0);
            if (v.re.value() != 0 || v.im.value() != 0) return false;
        }
    }
    return true;
}

double adjoint_defect(const DiffOperator& a, const std::vector<P3d>& pts) {
    const double n = op_norm(op_sub(a, adjoint(a)), pts);
    return n / (1.0 + op_norm(a, pts));
}

double residual_norm(const DiffOperator& a, const std::vector<P3d>& pts,
                     const DiffOperator& h, const DiffOperator& q) {
    const double n = op_norm(a, pts);
    return n / ((1.0 + op_norm(h, pts)) * (1.0 + op_norm(q, pts)));
}

}  // namespace pdm
