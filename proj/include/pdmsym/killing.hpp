#pragma once

#include <map>
#include <vector>

#include "pdmsym/coeff.hpp"

namespace pdm {

using Vec3q = std::array<Rat, 3>;
using Mat3q = std::array<std::array<Rat, 3>, 3>;

// Parameters of the polynomial conformal Killing basis: one vector, matrix,
// or scalar per basis index. Matrices are validated symmetric and traceless
// when set.
struct KillingParams {
    std::map<int, Vec3q> vectors;   // n in {2, 4, 7}
    std::map<int, Mat3q> matrices;  // n in {1, 3, 6, 8, 9}
    Rat k;                          // n = 5

    void set_vector(int n, const Vec3q& v);
    void set_matrix(int n, const Mat3q& m);
    void set_scalar(const Rat& v);
};

// Symmetric tensor field with polynomial components; an isotropic part g is
// folded into the diagonal at construction and kept for reference.
class KillingTensor {
  public:
    KillingTensor() = default;
    KillingTensor(std::array<Coeff, 6> packed, FieldPtr conformal,
                  std::shared_ptr<const Binding> binding);

    // 1-based symmetric access
    const Coeff& comp(int a, int b) const;
    const FieldPtr& conformal() const { return conformal_; }
    const std::shared_ptr<const Binding>& binding() const { return binding_; }
    bool rational_capable() const;

  private:
    std::array<Coeff, 6> c_{};  // upper triangle: 11 12 13 22 23 33
    FieldPtr conformal_;
    std::shared_ptr<const Binding> binding_;
};

// One basis tensor (n = 0 is the isotropic solution delta^{ab} g). Throws
// std::invalid_argument when the parameter shape for n is missing.
KillingTensor basis_tensor(int n, const KillingParams& p, FieldPtr g = nullptr,
                           std::shared_ptr<const Binding> b = nullptr);

// Reduced families used by the classification: constant, linear, and
// quadratic homogeneous tensors plus the x3-independent combination.
enum class KillingFamily { constant, linear, quadratic, shift };

struct FamilyParams {
    Vec3q vec{};   // linear: shift vector; quadratic: rotational vector;
                   // shift: lambda_2
    Mat3q mat{};   // constant: constant part; linear: screw matrix;
                   // quadratic: quadratic part; shift: lambda_1
    Rat sigma;     // shift only: coefficient of delta^{ab} rt^2 - x_a x_b
    Rat screw;     // shift only: coefficient of eps^{3 alpha c} x_c
};

KillingTensor family_tensor(KillingFamily fam, const FamilyParams& p,
                            FieldPtr g = nullptr,
                            std::shared_ptr<const Binding> b = nullptr);

// Max-abs first-order defect of the conformal Killing condition over the
// points, taken over index triples a <= b <= c.
double killing_residual(const KillingTensor& t, const std::vector<P3d>& pts);
Rat killing_residual(const KillingTensor& t, const std::vector<P3q>& pts);

}  // namespace pdm
