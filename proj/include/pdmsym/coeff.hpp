#pragma once

#include <functional>
#include <memory>

#include "pdmsym/field.hpp"

namespace pdm {

using P3d = std::array<double, 3>;
using P3q = std::array<Rat, 3>;

// Complex jet as a pair of real jets.
template <class S>
struct CJet {
    Jet<S> re, im;

    static CJet zero(const std::array<S, 3>& base, int ord) {
        return {jet_const(S(0), base, ord), jet_const(S(0), base, ord)};
    }
};

template <class S>
CJet<S> cjet_add(const CJet<S>& a, const CJet<S>& b) {
    return {jet_add(a.re, b.re), jet_add(a.im, b.im)};
}
template <class S>
CJet<S> cjet_sub(const CJet<S>& a, const CJet<S>& b) {
    return {jet_sub(a.re, b.re), jet_sub(a.im, b.im)};
}
template <class S>
CJet<S> cjet_neg(const CJet<S>& a) {
    return {jet_neg(a.re), jet_neg(a.im)};
}
template <class S>
CJet<S> cjet_mul(const CJet<S>& a, const CJet<S>& b) {
    return {jet_sub(jet_mul(a.re, b.re), jet_mul(a.im, b.im)),
            jet_add(jet_mul(a.re, b.im), jet_mul(a.im, b.re))};
}
template <class S>
CJet<S> cjet_div(const CJet<S>& a, const CJet<S>& b) {
    // (a / b) = a * conj(b) / |b|^2; exact in rational mode.
    auto den = jet_add(jet_mul(b.re, b.re), jet_mul(b.im, b.im));
    auto nre = jet_add(jet_mul(a.re, b.re), jet_mul(a.im, b.im));
    auto nim = jet_sub(jet_mul(a.im, b.re), jet_mul(a.re, b.im));
    return {jet_div(nre, den), jet_div(nim, den)};
}
template <class S>
CJet<S> cjet_conj(const CJet<S>& a) {
    return {a.re, jet_neg(a.im)};
}
template <class S>
CJet<S> cjet_deriv(const CJet<S>& a, int axis) {
    return {jet_deriv(a.re, axis), jet_deriv(a.im, axis)};
}

enum class CoeffTag { FromAst, Derived };

class CoeffImpl;

// A variable complex coefficient: a pure evaluator (point, order) -> complex
// jet, usable in double mode always and in exact rational mode when every
// ingredient is rational. A default-constructed Coeff is the structural zero,
// which the operator algebra skips without evaluation.
class Coeff {
  public:
    Coeff() = default;

    static Coeff constant(const CRat& v);
    static Coeff from_field(FieldPtr e, std::shared_ptr<const Binding> b);
    static Coeff from_functions(
        std::function<CJet<double>(const P3d&, int)> fd,
        std::function<CJet<Rat>(const P3q&, int)> fq, CoeffTag tag);

    bool is_zero() const { return !impl_; }
    bool rational_capable() const;
    CoeffTag tag() const;

    // Cached evaluation; throws EvalError on singular points, and in rational
    // mode also when any ingredient is float-only.
    CJet<double> eval(const P3d& p, int ord) const;
    CJet<Rat> eval(const P3q& p, int ord) const;

    // Derivative along axis 1..3; memoized per parent so repeated requests
    // share one evaluation cache.
    Coeff deriv(int axis) const;

  private:
    friend Coeff cf_add(const Coeff&, const Coeff&);
    friend Coeff cf_sub(const Coeff&, const Coeff&);
    friend Coeff cf_neg(const Coeff&);
    friend Coeff cf_mul(const Coeff&, const Coeff&);
    friend Coeff cf_div(const Coeff&, const Coeff&);
    friend Coeff cf_conj(const Coeff&);
    friend Coeff cf_scale(const Coeff&, const CRat&);

    static Coeff wrap(std::shared_ptr<CoeffImpl> impl);

    std::shared_ptr<CoeffImpl> impl_;
};

Coeff cf_add(const Coeff& a, const Coeff& b);
Coeff cf_sub(const Coeff& a, const Coeff& b);
Coeff cf_neg(const Coeff& a);
Coeff cf_mul(const Coeff& a, const Coeff& b);
Coeff cf_div(const Coeff& a, const Coeff& b);
Coeff cf_conj(const Coeff& a);
Coeff cf_scale(const Coeff& a, const CRat& s);
inline Coeff cf_deriv(const Coeff& a, int axis) { return a.deriv(axis); }

}  // namespace pdm
