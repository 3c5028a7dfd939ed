#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "pdmsym/multiindex.hpp"
#include "pdmsym/rational.hpp"

namespace pdm {

// Truncated Taylor polynomial in three variables at a base point. Coefficients
// are Taylor coefficients (partial derivative / alpha!), stored densely in the
// graded order of OrderTable, so products are plain truncated convolutions and
// extract_partial is the only place factorials appear.
template <class S>
struct Jet {
    int ord = 0;
    std::array<S, 3> base{};
    std::vector<S> c;

    const OrderTable& table() const { return OrderTable::get(ord); }
    const S& value() const { return c[0]; }
};

namespace detail {
template <class S>
void require_compatible(const Jet<S>& a, const Jet<S>& b) {
    if (a.ord != b.ord) throw std::invalid_argument("jet order mismatch");
    if (a.base != b.base) throw std::invalid_argument("jet base-point mismatch");
}
}  // namespace detail

template <class S>
Jet<S> jet_const(const S& v, const std::array<S, 3>& base, int order) {
    Jet<S> j;
    j.ord = order;
    j.base = base;
    j.c.assign(OrderTable::get(order).size(), S(0));
    j.c[0] = v;
    return j;
}

// Jet of the coordinate function x_axis, axis in 1..3.
template <class S>
Jet<S> jet_variable(const std::array<S, 3>& base, int axis, int order) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("axis must be 1..3");
    Jet<S> j = jet_const(base[axis - 1], base, order);
    if (order >= 1) {
        MIdx m;
        (axis == 1 ? m.i1 : axis == 2 ? m.i2 : m.i3) = 1;
        j.c[j.table().index_of(m)] = S(1);
    }
    return j;
}

template <class S>
Jet<S> jet_add(const Jet<S>& a, const Jet<S>& b) {
    detail::require_compatible(a, b);
    Jet<S> r = a;
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
    return r;
}

template <class S>
Jet<S> jet_sub(const Jet<S>& a, const Jet<S>& b) {
    detail::require_compatible(a, b);
    Jet<S> r = a;
    for (size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
    return r;
}

template <class S>
Jet<S> jet_neg(const Jet<S>& a) {
    Jet<S> r = a;
    for (auto& x : r.c) x = -x;
    return r;
}

template <class S>
Jet<S> jet_scale(const Jet<S>& a, const S& s) {
    Jet<S> r = a;
    for (auto& x : r.c) x *= s;
    return r;
}

template <class S>
Jet<S> jet_mul(const Jet<S>& a, const Jet<S>& b) {
    detail::require_compatible(a, b);
    const OrderTable& t = a.table();
    Jet<S> r = jet_const(S(0), a.base, a.ord);
    for (int k = 0; k < t.size(); ++k) {
        S acc(0);
        for (const auto& [i, j] : t.conv(k)) acc += a.c[i] * b.c[j];
        r.c[k] = acc;
    }
    return r;
}

template <class S>
bool jet_is_zero_value(const S& v) {
    if constexpr (std::is_same_v<S, double>)
        return v == 0.0;
    else
        return v == 0;
}

// Solves jet_mul(c, b) = a for c by forward substitution in graded order: every
// convolution pair (i, j) for target k with j < k is already known, and the
// only pair with j == k has i == 0.
template <class S>
Jet<S> jet_div(const Jet<S>& a, const Jet<S>& b) {
    detail::require_compatible(a, b);
    if (jet_is_zero_value(b.value())) throw EvalError("jet division by zero value");
    const OrderTable& t = a.table();
    Jet<S> r = jet_const(S(0), a.base, a.ord);
    for (int k = 0; k < t.size(); ++k) {
        S acc = a.c[k];
        for (const auto& [i, j] : t.conv(k))
            if (j != k) acc -= b.c[i] * r.c[j];
        r.c[k] = acc / b.c[0];
    }
    return r;
}

// Derivative along axis (1..3); the result is one order lower.
template <class S>
Jet<S> jet_deriv(const Jet<S>& u, int axis) {
    if (axis < 1 || axis > 3) throw std::invalid_argument("axis must be 1..3");
    if (u.ord < 1) throw std::invalid_argument("cannot differentiate an order-0 jet");
    const OrderTable& t = u.table();
    Jet<S> r = jet_const(S(0), u.base, u.ord - 1);
    const OrderTable& rt = r.table();
    for (int k = 0; k < rt.size(); ++k) {
        const int up = t.index_of([&] {
            MIdx m = rt.midx(k);
            (axis == 1 ? m.i1 : axis == 2 ? m.i2 : m.i3) += 1;
            return m;
        }());
        r.c[k] = u.c[up] * S(rt.midx(k)[axis - 1] + 1);
    }
    return r;
}

// True partial derivative alpha! * coeff[alpha] at the base point.
template <class S>
S extract_partial(const Jet<S>& u, const MIdx& alpha) {
    if (alpha.deg() > u.ord) throw std::invalid_argument("partial order exceeds jet order");
    const OrderTable& t = u.table();
    return u.c[t.index_of(alpha)] * S(t.factorial(alpha));
}

template <class S>
Jet<S> jet_pow(const Jet<S>& a, int e) {
    if (e < 0) return jet_div(jet_const(S(1), a.base, a.ord), jet_pow(a, -e));
    Jet<S> r = jet_const(S(1), a.base, a.ord);
    Jet<S> p = a;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) r = jet_mul(r, p);
        p = (k >> 1) ? jet_mul(p, p) : p;
    }
    return r;
}

// Composition with a univariate Taylor table of g at u.value(): Horner over
// the zero-constant part of u. Float-only; rational mode never reaches here
// (transcendentals are rejected syntactically upstream).
inline Jet<double> jet_compose(const Jet<double>& u, const std::vector<double>& series) {
    if (series.size() < static_cast<size_t>(u.ord) + 1)
        throw std::invalid_argument("composition series shorter than jet order");
    Jet<double> w = u;
    w.c[0] = 0.0;
    Jet<double> r = jet_const(series[u.ord], u.base, u.ord);
    for (int k = u.ord - 1; k >= 0; --k) {
        r = jet_mul(r, w);
        r.c[0] += series[k];
    }
    return r;
}

// General substitution: evaluates the jet of c (taken at the image point) on
// three component jets sharing a common base. Powers of the zero-constant
// parts implement c(T(x)) for coefficient transport under point transforms.
template <class S>
Jet<S> jet_subst(const Jet<S>& c_at_image, const Jet<S>& w1, const Jet<S>& w2,
                 const Jet<S>& w3) {
    detail::require_compatible(w1, w2);
    detail::require_compatible(w1, w3);
    const int D = w1.ord;
    if (c_at_image.ord < D) throw std::invalid_argument("image jet order too low");
    auto centered = [&](const Jet<S>& w) {
        Jet<S> z = w;
        z.c[0] = S(0);
        return z;
    };
    const Jet<S> z1 = centered(w1), z2 = centered(w2), z3 = centered(w3);
    std::vector<Jet<S>> p1{jet_const(S(1), w1.base, D)}, p2 = p1, p3 = p1;
    for (int d = 1; d <= D; ++d) {
        p1.push_back(jet_mul(p1.back(), z1));
        p2.push_back(jet_mul(p2.back(), z2));
        p3.push_back(jet_mul(p3.back(), z3));
    }
    const OrderTable& ct = OrderTable::get(c_at_image.ord);
    Jet<S> r = jet_const(S(0), w1.base, D);
    for (int k = 0; k < ct.size(); ++k) {
        const MIdx& m = ct.midx(k);
        if (m.deg() > D) break;
        if (jet_is_zero_value(c_at_image.c[k])) continue;
        Jet<S> term = jet_scale(p1[m.i1], c_at_image.c[k]);
        term = jet_mul(term, p2[m.i2]);
        term = jet_mul(term, p3[m.i3]);
        r = jet_add(r, term);
    }
    return r;
}

// Univariate Taylor tables (value, g', g''/2!, ...) for the supported
// transcendentals, each at expansion point u0.
std::vector<double> series_sqrt(double u0, int order);
std::vector<double> series_exp(double u0, int order);
std::vector<double> series_ln(double u0, int order);
std::vector<double> series_sin(double u0, int order);
std::vector<double> series_cos(double u0, int order);
std::vector<double> series_atan(double u0, int order);

}  // namespace pdm
