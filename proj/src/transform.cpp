#include "pdmsym/transform.hpp"

#include <cmath>

namespace pdm {

namespace {

constexpr double kPi = 3.14159265358979323846;

Coeff poly_coeff(const std::string& src) {
    static const auto empty = std::make_shared<const Binding>();
    return Coeff::from_field(parse_field(src), empty);
}

}  // namespace

PointTransform PointTransform::rotation(int axis, const Rat& angle_deg) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("rotation axis must be 1..3");
    PointTransform t;
    t.kind_ = TransformKind::Rotation;
    t.axis_ = axis;
    t.angle_deg_ = angle_deg;
    // Right-handed rotation mixing the cyclic pair (axis+1, axis+2).
    const int u = axis % 3, v = (axis + 1) % 3;  // 0-based
    Rat norm = angle_deg;
    // reduce mod 360 for the exactness test
    Rat q = norm / 360;
    mpz_class whole = q.get_num() / q.get_den();
    norm -= Rat(whole) * 360;
    if (norm < 0) norm += 360;
    t.exact_ = norm.get_den() == 1 && mpz_class(norm.get_num() % 90) == 0;
    for (int a = 0; a < 3; ++a) t.mq_[a][a] = 1;
    if (t.exact_) {
        const long k = mpz_class(norm.get_num() / 90).get_si() % 4;
        static const int cs[4] = {1, 0, -1, 0}, sn[4] = {0, 1, 0, -1};
        t.mq_[u][u] = cs[k];
        t.mq_[u][v] = -sn[k];
        t.mq_[v][u] = sn[k];
        t.mq_[v][v] = cs[k];
    }
    const double th = rat_d(angle_deg) * kPi / 180.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) t.md_[a][b] = a == b ? 1.0 : 0.0;
    t.md_[u][u] = std::cos(th);
    t.md_[u][v] = -std::sin(th);
    t.md_[v][u] = std::sin(th);
    t.md_[v][v] = std::cos(th);
    if (t.exact_)
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) t.md_[a][b] = rat_d(t.mq_[a][b]);
    return t;
}

PointTransform PointTransform::shift(const std::array<Rat, 3>& v) {
    PointTransform t;
    t.kind_ = TransformKind::Shift;
    for (int a = 0; a < 3; ++a) {
        t.mq_[a][a] = 1;
        t.md_[a][a] = 1.0;
        t.tq_[a] = v[a];
        t.td_[a] = rat_d(v[a]);
    }
    return t;
}

PointTransform PointTransform::dilatation(const Rat& s) {
    if (s == 0) throw std::invalid_argument("dilatation factor must be nonzero");
    PointTransform t;
    t.kind_ = TransformKind::Dilatation;
    for (int a = 0; a < 3; ++a) {
        t.mq_[a][a] = s;
        t.md_[a][a] = rat_d(s);
    }
    return t;
}

PointTransform PointTransform::inversion(bool weighted) {
    PointTransform t;
    t.kind_ = TransformKind::Inversion;
    t.weighted_ = weighted;
    return t;
}

PointTransform PointTransform::inverse() const {
    switch (kind_) {
        case TransformKind::Rotation:
            return rotation(axis_, -angle_deg_);
        case TransformKind::Shift:
            return shift({-tq_[0], -tq_[1], -tq_[2]});
        case TransformKind::Dilatation:
            return dilatation(Rat(1) / mq_[0][0]);
        case TransformKind::Inversion:
            return *this;
    }
    throw std::logic_error("unreachable");
}

bool PointTransform::rational_capable() const {
    return kind_ == TransformKind::Inversion || exact_;
}

P3d PointTransform::apply(const P3d& p) const {
    if (kind_ == TransformKind::Inversion) {
        const double r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if (r2 == 0.0) throw EvalError("inversion is singular at the origin");
        return {p[0] / r2, p[1] / r2, p[2] / r2};
    }
    P3d y{};
    for (int a = 0; a < 3; ++a) {
        y[a] = td_[a];
        for (int b = 0; b < 3; ++b) y[a] += md_[a][b] * p[b];
    }
    return y;
}

P3q PointTransform::apply(const P3q& p) const {
    if (kind_ == TransformKind::Inversion) {
        const Rat r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if (r2 == 0) throw EvalError("inversion is singular at the origin");
        return {p[0] / r2, p[1] / r2, p[2] / r2};
    }
    if (!exact_) throw EvalError("transform is not available in rational mode");
    P3q y{};
    for (int a = 0; a < 3; ++a) {
        y[a] = tq_[a];
        for (int b = 0; b < 3; ++b) y[a] += mq_[a][b] * p[b];
    }
    return y;
}

template <class S>
std::array<Jet<S>, 3> PointTransform::component_jets(const std::array<S, 3>& p,
                                                     int ord) const {
    std::array<Jet<S>, 3> w{jet_const(S(0), p, ord), jet_const(S(0), p, ord),
                            jet_const(S(0), p, ord)};
    const std::array<Jet<S>, 3> var{jet_variable(p, 1, ord), jet_variable(p, 2, ord),
                                    jet_variable(p, 3, ord)};
    if (kind_ == TransformKind::Inversion) {
        Jet<S> r2 = jet_const(S(0), p, ord);
        for (const auto& v : var) r2 = jet_add(r2, jet_mul(v, v));
        for (int a = 0; a < 3; ++a) w[a] = jet_div(var[a], r2);
        return w;
    }
    for (int a = 0; a < 3; ++a) {
        S t, m[3];
        if constexpr (std::is_same_v<S, double>) {
            t = td_[a];
            for (int b = 0; b < 3; ++b) m[b] = md_[a][b];
        } else {
            if (!exact_) throw EvalError("transform is not available in rational mode");
            t = tq_[a];
            for (int b = 0; b < 3; ++b) m[b] = mq_[a][b];
        }
        w[a] = jet_const(t, p, ord);
        for (int b = 0; b < 3; ++b)
            if (!jet_is_zero_value(m[b])) w[a] = jet_add(w[a], jet_scale(var[b], m[b]));
    }
    return w;
}

template std::array<Jet<double>, 3> PointTransform::component_jets(
    const std::array<double, 3>&, int) const;
template std::array<Jet<Rat>, 3> PointTransform::component_jets(
    const std::array<Rat, 3>&, int) const;

Coeff PointTransform::w_entry(int a, int b) const {
    if (kind_ == TransformKind::Inversion) {
        // W = r^2 I - 2 x x^T
        if (a == b) {
            std::string s;
            for (int c = 1; c <= 3; ++c) {
                const std::string t = "x" + std::to_string(c) + "^2";
                if (c == a)
                    s = s.empty() ? "-" + t : s + "-" + t;
                else
                    s = s.empty() ? t : s + "+" + t;
            }
            return poly_coeff(s);
        }
        return cf_scale(
            poly_coeff("x" + std::to_string(a) + "*x" + std::to_string(b)),
            CRat(Rat(-2), Rat(0)));
    }
    // Affine: W = (M^T)^{-1}; rotations are orthogonal (W = M) and
    // dilatations scale by 1/s.
    Rat wq;
    if (kind_ == TransformKind::Dilatation)
        wq = a == b ? Rat(1) / mq_[0][0] : Rat(0);
    else if (kind_ == TransformKind::Shift)
        wq = a == b ? Rat(1) : Rat(0);
    else if (exact_)
        wq = mq_[a - 1][b - 1];
    else {
        const double wd = md_[a - 1][b - 1];
        if (wd == 0.0) return Coeff();
        return Coeff::from_functions(
            [wd](const P3d& p, int ord) {
                return CJet<double>{jet_const(wd, p, ord), jet_const(0.0, p, ord)};
            },
            nullptr, CoeffTag::Derived);
    }
    if (wq == 0) return Coeff();
    return Coeff::constant(CRat(wq, Rat(0)));
}

Coeff PointTransform::log_weight_deriv(int a) const {
    if (!weighted_) return Coeff();
    // m = r^{-3}: D_a log m = 3 x_a, rational.
    return cf_scale(poly_coeff("x" + std::to_string(a)), CRat(Rat(3), Rat(0)));
}

Coeff cf_pullback(const Coeff& c, const PointTransform& t) {
    if (c.is_zero()) return c;
    auto fd = [c, t](const P3d& p, int ord) -> CJet<double> {
        const auto w = t.component_jets<double>(p, ord);
        const P3d y0{w[0].value(), w[1].value(), w[2].value()};
        const CJet<double> cj = c.eval(y0, ord);
        return {jet_subst(cj.re, w[0], w[1], w[2]),
                jet_subst(cj.im, w[0], w[1], w[2])};
    };
    std::function<CJet<Rat>(const P3q&, int)> fq;
    if (c.rational_capable() && t.rational_capable())
        fq = [c, t](const P3q& p, int ord) -> CJet<Rat> {
            const auto w = t.component_jets<Rat>(p, ord);
            const P3q y0{w[0].value(), w[1].value(), w[2].value()};
            const CJet<Rat> cj = c.eval(y0, ord);
            return {jet_subst(cj.re, w[0], w[1], w[2]),
                    jet_subst(cj.im, w[0], w[1], w[2])};
        };
    return Coeff::from_functions(std::move(fd), std::move(fq), CoeffTag::Derived);
}

DiffOperator pullback(const DiffOperator& a, const PointTransform& t) {
    // The conjugated derivative E_a = D_a - D_a(log m) in source coordinates;
    // the E_a commute, so symmetrized powers are order-independent.
    std::array<DiffOperator, 3> e;
    for (int ax = 1; ax <= 3; ++ax) {
        DiffOperator& d = e[ax - 1];
        for (int b = 1; b <= 3; ++b) {
            Coeff w = t.w_entry(ax, b);
            if (w.is_zero()) continue;
            MIdx m;
            (b == 1 ? m.i1 : b == 2 ? m.i2 : m.i3) = 1;
            d.set_coeff(m, std::move(w));
        }
        Coeff lw = t.log_weight_deriv(ax);
        if (!lw.is_zero()) d.set_coeff(MIdx{}, cf_neg(lw));
    }

    const OrderTable& tab = OrderTable::get(a.order());
    DiffOperator r;
    for (int k = 0; k < tab.size(); ++k) {
        const Coeff& c = a.comps()[k];
        if (c.is_zero()) continue;
        const MIdx& alpha = tab.midx(k);
        DiffOperator term = op_mult(cf_pullback(c, t));
        for (int ax = 1; ax <= 3; ++ax)
            for (int cnt = 0; cnt < alpha[ax - 1]; ++cnt)
                term = op_mul(term, e[ax - 1]);
        r = op_add(r, term);
    }
    return r;
}

}  // namespace pdm
