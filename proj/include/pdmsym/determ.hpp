#pragma once

#include "pdmsym/killing.hpp"

namespace pdm {

enum class SymmetryTag { none, dilatation, shift };

// Inputs for the first-order determining residuals. The tensor carries its
// conformal part already folded in; the fields may be given either in the
// (f, V, eta) presentation or in the linearized (M, N, Mt, Nt) one. Absent
// entries stay null and are derived on demand: f = 1/M, V = Mt/M,
// eta = N Mt / M - Nt.
struct DeterminingSystem {
    KillingTensor mu;
    FieldPtr f, V, eta;
    FieldPtr M, N, Mt, Nt;
    std::shared_ptr<const Binding> binding;
    SymmetryTag tag = SymmetryTag::none;
};

// Builds the (f, V, eta) views from linearized data once, so the residual
// evaluators never re-derive them per call.
DeterminingSystem linearized_system(KillingTensor mu, FieldPtr M, FieldPtr N,
                                    FieldPtr Mt, FieldPtr Nt,
                                    std::shared_ptr<const Binding> b,
                                    SymmetryTag tag = SymmetryTag::none);

// max_a |(mu^{nn}_a + 2 mu^{na}_n) f - 5 mu^{an} f_n|. The double overloads
// normalize per point by 1 + the largest competing term, the rational ones
// return the raw defect (their use case is exact zero). When `worst` is
// given it receives the point realizing the maximum.
double residual_mass(const DeterminingSystem& s, const std::vector<P3d>& pts,
                   P3d* worst = nullptr);
Rat residual_mass(const DeterminingSystem& s, const std::vector<P3q>& pts);

// max_a |mu^{an} V_n - f eta_a|, same conventions.
double residual_potential(const DeterminingSystem& s, const std::vector<P3d>& pts,
                   P3d* worst = nullptr);
Rat residual_potential(const DeterminingSystem& s, const std::vector<P3q>& pts);

// max_a |(mu^{nn}_a + 2 mu^{na}_n) M + 5 (mu^{an} M_n + N_a)| for the
// polynomial (non-conformal) tensor part; serves the potential-side pair
// when called with (Mt, Nt).
double residual_mass_linear(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                    std::shared_ptr<const Binding> b,
                    const std::vector<P3d>& pts, P3d* worst = nullptr);
Rat residual_mass_linear(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                 std::shared_ptr<const Binding> b, const std::vector<P3q>& pts);

// The two term groups of the linear mass equation per component; the defect
// is t1[a] - t2[a]. Either field may be null (treated as zero), which is how
// the ansatz solver obtains per-basis-element columns.
struct MassRows {
    std::array<Coeff, 3> t1, t2;
};
MassRows mass_rows(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                 std::shared_ptr<const Binding> b);

// w*u + x.grad u as an evaluator (zero exactly when u is homogeneous of
// degree -w).
Coeff euler_defect(const Coeff& u, const Rat& weight,
                   std::shared_ptr<const Binding> b);

// max |x_a u_a + weight u|; Euler's identity for homogeneity degree -weight.
double residual_homogeneity(FieldPtr u, std::shared_ptr<const Binding> b,
                            const Rat& weight, const std::vector<P3d>& pts);
Rat residual_homogeneity(FieldPtr u, std::shared_ptr<const Binding> b,
                         const Rat& weight, const std::vector<P3q>& pts);

// Relaxed mode where x_a u_a + weight u is only required to be constant:
// the constant is read off at the first point and the worst deviation from
// it over the remaining points is reported.
struct ConstantFit {
    double constant = 0.0;
    double deviation = 0.0;
};
ConstantFit homogeneity_constant(FieldPtr u, std::shared_ptr<const Binding> b,
                                 const Rat& weight, const std::vector<P3d>& pts);

// Closed-form N reconstructions for the constant and linear tensor families:
// N = (1/2) lambda^{ab} x_a M_b, and
// N = r^2 lambda^b M_b + eps^{bcd} lambda^{cn} x_n x_d M_b.
// Families beyond these two have no printed contraction and are rejected.
Coeff reconstruct_N(KillingFamily fam, const FamilyParams& p, FieldPtr M,
                    std::shared_ptr<const Binding> b);

using CoeffMatrix = std::array<std::array<Coeff, 3>, 3>;

// A^{ab} = mu^{ab} - lambda^a x_b, the coefficient matrix of the reduced
// first-order system for linear tensor families.
CoeffMatrix reduced_matrix(const KillingTensor& mu, const Vec3q& lambda);

// Compatibility of A^{ab} M_b with being a gradient:
// max over points and pairs (a, c) of |(A^{ab} M_b)_c - (A^{cb} M_b)_a|.
double curl_consequence(const CoeffMatrix& A, FieldPtr M,
                        std::shared_ptr<const Binding> b,
                        const std::vector<P3d>& pts);
Rat curl_consequence(const CoeffMatrix& A, FieldPtr M,
                     std::shared_ptr<const Binding> b,
                     const std::vector<P3q>& pts);

}  // namespace pdm
