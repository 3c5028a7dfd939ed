#pragma once

#include "pdmsym/op.hpp"

namespace pdm {

enum class TransformKind { Rotation, Shift, Dilatation, Inversion };

// A point transform y = T(x) together with the multiplier weight the
// corresponding wavefunction substitution carries. Rotations by multiples of
// 90 degrees, shifts, dilatations, and the inversion are exact over the
// rationals; other rotation angles are float-only.
class PointTransform {
  public:
    static PointTransform rotation(int axis, const Rat& angle_deg);
    static PointTransform shift(const std::array<Rat, 3>& v);
    static PointTransform dilatation(const Rat& s);
    // x -> x / r^2. The weighted form carries the |T(x)|^3 multiplier that
    // makes the substitution unitary; the unweighted form transforms the bare
    // function.
    static PointTransform inversion(bool weighted = true);

    TransformKind kind() const { return kind_; }
    bool weighted() const { return weighted_; }
    PointTransform inverse() const;
    bool rational_capable() const;

    P3d apply(const P3d& p) const;
    P3q apply(const P3q& p) const;

    // Jets of the image components y_a at p, all of the given order.
    template <class S>
    std::array<Jet<S>, 3> component_jets(const std::array<S, 3>& p, int ord) const;

    // Row a of the matrix W with (d/dy_a phi)(T(x)) = sum_b W_ab d/dx_b
    // (phi(T(x))); constant for affine transforms, quadratic for the
    // inversion.
    Coeff w_entry(int a, int b) const;

    // D_a(log m) for the multiplier m; structural zero when unweighted.
    Coeff log_weight_deriv(int a) const;

  private:
    PointTransform() = default;

    TransformKind kind_ = TransformKind::Shift;
    bool weighted_ = false;
    bool exact_ = true;
    Rat angle_deg_;  // rotations, for inverse()
    int axis_ = 3;
    std::array<std::array<Rat, 3>, 3> mq_{};
    std::array<Rat, 3> tq_{};
    std::array<std::array<double, 3>, 3> md_{};
    std::array<double, 3> td_{};
};

// Conjugated pullback of a coefficient: x -> c(T(x)) as an evaluator.
Coeff cf_pullback(const Coeff& c, const PointTransform& t);

// The operator m (A (m^{-1} psi) o T^{-1}) o T m^{-1}-style transport: the
// coefficients move to c o T and each d/dy becomes the W-combination of d/dx,
// conjugated by the multiplier. pullback(pullback(A, T), T.inverse()) == A.
DiffOperator pullback(const DiffOperator& a, const PointTransform& t);

}  // namespace pdm
