#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pdmsym/determ.hpp"
#include "pdmsym/killing.hpp"

namespace pdm {

// Linear ansatz for the pair (M, N): M = sum a_k * basis_M[k],
// N = sum b_j * basis_N[j]. Optional Euler weights add homogeneity rows
// (w*u + x.grad u = 0) for the corresponding block.
struct Ansatz {
    std::vector<FieldPtr> basis_M;
    std::vector<FieldPtr> basis_N;
    std::optional<Rat> weight_M;
    std::optional<Rat> weight_N;

    int cols() const {
        return static_cast<int>(basis_M.size() + basis_N.size());
    }
};

struct LinearSystem {
    Eigen::MatrixXd A;
    int m_cols = 0;  // leading columns belong to the M basis
};

// Rows are (equation component x sample point); at least 3x the column count
// is required, so callers must supply enough points. Throws
// std::invalid_argument on an empty basis or too few points and EvalError if
// a basis element cannot be evaluated at a sample point.
LinearSystem assemble(const KillingTensor& mu, const Ansatz& a,
                      std::shared_ptr<const Binding> b,
                      const std::vector<P3d>& pts);

struct NullspaceResult {
    int dimension = 0;
    std::vector<std::vector<double>> basis;  // each vector has A.cols() entries
    std::vector<double> singular_values;     // descending
    bool degenerate = false;                 // the whole matrix vanished
};

// SVD route: the nullspace dimension is the number of singular values below
// tol relative to the largest one. An identically zero matrix is flagged
// degenerate and reports full dimension.
NullspaceResult nullspace(const LinearSystem& L, double tol = 1e-9);

// Exact route, independent of the SVD: Gaussian elimination over rationals on
// rows evaluated at the given lattice points (2x the column count rows are
// used; throws std::invalid_argument if the points cannot supply them).
int rational_nullity(const KillingTensor& mu, const Ansatz& a,
                     std::shared_ptr<const Binding> b,
                     const std::vector<P3q>& pts);

// Residual of one coefficient vector against the linear mass equation at the
// given points, by linearity of the equation in (M, N). Matches what
// residual_mass_linear would report for the combined closed-form fields.
double vector_residual(const KillingTensor& mu, const Ansatz& a,
                       std::shared_ptr<const Binding> b,
                       const std::vector<double>& coeffs,
                       const std::vector<P3d>& pts);

// One parameter set of the linear family: vector part lam, matrix part
// diag(mu11, 0, nu33).
struct FamilySet {
    std::string name;
    Vec3q lam{};
    Rat mu11;
    Rat nu33;
};

struct SolvabilityRow {
    std::string name;
    int dimension = 0;
    bool degenerate = false;
};

// Runs the same ansatz against each parameter set of the linear family and
// reports the nullspace dimension per set.
std::vector<SolvabilityRow> family_solvability(
    const std::vector<FamilySet>& sets, const Ansatz& a,
    std::shared_ptr<const Binding> b, const std::vector<P3d>& pts,
    double tol = 1e-9);

// On-disk ansatz: basis lists, optional homogeneity weights, the tensor
// family and its parameters, and named rational parameters for the basis
// expressions.
struct AnsatzFile {
    Ansatz ansatz;
    KillingFamily family = KillingFamily::constant;
    FamilyParams params;
    std::shared_ptr<const Binding> binding;

    KillingTensor tensor() const;
};

AnsatzFile load_ansatz(const std::string& path);
AnsatzFile parse_ansatz(const std::string& text, const std::string& origin);

}  // namespace pdm
