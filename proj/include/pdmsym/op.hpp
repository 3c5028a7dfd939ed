#pragma once

#include <map>
#include <optional>

#include "pdmsym/coeff.hpp"

namespace pdm {

inline constexpr int kMaxOpOrder = 4;

enum class Generator { P1, P2, P3, L1, L2, L3, D, K1, K2, K3 };

std::optional<Generator> generator_from_name(const std::string& name);

// Linear differential operator sum c_alpha(x) d^alpha with |alpha| <= 4 and
// variable complex coefficients. Operators are immutable evaluator graphs;
// arithmetic builds new graphs and point evaluation is where numbers appear.
class DiffOperator {
  public:
    DiffOperator() : comp_(1) {}  // the zero operator

    int order() const { return ord_; }
    const Coeff& coeff(const MIdx& alpha) const;
    void set_coeff(const MIdx& alpha, Coeff c);
    const std::vector<Coeff>& comps() const { return comp_; }
    bool rational_capable() const;

    // Drops top degrees whose coefficients are all structural zeros.
    void normalize_order();

    // Order-4 cancellation certificates attached by commutator(): coefficients
    // that must vanish identically, checked against the factor norms whenever
    // the operator is evaluated through op_norm / op_exact_zero.
    struct Certificate {
        std::vector<Coeff> vanishing;
        std::shared_ptr<const DiffOperator> a, b;
    };
    std::vector<Certificate> certs;

  private:
    int ord_ = 0;
    std::vector<Coeff> comp_;  // indexed per OrderTable::get(ord_)
};

DiffOperator op_identity();
DiffOperator op_const(const CRat& c);
DiffOperator op_mult(Coeff c);  // multiplication operator
DiffOperator op_add(const DiffOperator& a, const DiffOperator& b);
DiffOperator op_sub(const DiffOperator& a, const DiffOperator& b);
DiffOperator op_neg(const DiffOperator& a);
DiffOperator op_scale(const DiffOperator& a, const CRat& s);

// Composition by the generalized Leibniz rule; requires
// order(a) + order(b) <= 4.
DiffOperator op_mul(const DiffOperator& a, const DiffOperator& b);

DiffOperator anticommutator(const DiffOperator& a, const DiffOperator& b);

// [a, b] for operators of order <= 2 each. The order-4 part cancels
// identically; its coefficients are kept as a certificate and verified at
// every evaluation point (exactly in rational mode, below 1e-12 relative in
// float mode). A violation raises std::logic_error.
DiffOperator commutator(const DiffOperator& a, const DiffOperator& b);

DiffOperator op_from_generator(Generator g);

// H = -f Lap - (grad f).grad + (V - Lap f / 2 + |grad f|^2 / (4 f)).
DiffOperator hamiltonian(FieldPtr f, FieldPtr V, std::shared_ptr<const Binding> b);

// Same kinetic part with the zeroth-order term given directly.
DiffOperator hamiltonian_alt(FieldPtr f, FieldPtr vhat,
                             std::shared_ptr<const Binding> b);

// sqrt(N) A sqrt(N) for order(A) <= 2, expanded so only N and its derivatives
// appear; defined wherever N is nonzero, including negative N.
DiffOperator conjugate_sqrt(FieldPtr n, const DiffOperator& a,
                            std::shared_ptr<const Binding> b);

// Formal adjoint on L^2(dx).
DiffOperator adjoint(const DiffOperator& a);

// Max coefficient magnitude over points (order-0 evaluation). Verifies any
// attached cancellation certificates along the way.
double op_norm(const DiffOperator& a, const std::vector<P3d>& pts);

// Exact rational evaluation at every point; true iff all coefficients vanish.
bool op_exact_zero(const DiffOperator& a, const std::vector<P3q>& pts);

// op_norm(a - adjoint(a)) / (1 + op_norm(a)).
double adjoint_defect(const DiffOperator& a, const std::vector<P3d>& pts);

// op_norm(a) / ((1 + op_norm(h)) (1 + op_norm(q))); the commutation test
// statistic for a = [h, q].
double residual_norm(const DiffOperator& a, const std::vector<P3d>& pts,
                     const DiffOperator& h, const DiffOperator& q);

struct OpEnv {
    std::shared_ptr<const Binding> binding;
    std::optional<DiffOperator> hamiltonian;
    std::map<std::string, DiffOperator> named;
};

// Parses the operator grammar (generators, H, i, rational scalars, parameters,
// field(...) multiplication operators, +, -, *, ^k, anti{A,B}, dot(N, A)) and
// gates the result on formal self-adjointness at generic sample points.
DiffOperator parse_operator(const std::string& src, const OpEnv& env);

// The sample points the realness gate uses (exposed for tests).
const std::vector<P3d>& realness_gate_points();

}  // namespace pdm
