#include "pdmsym/determ.hpp"

#include <cmath>
#include <stdexcept>

namespace pdm {

namespace {

FieldPtr coord(int a) { return f_name("x" + std::to_string(a)); }

std::shared_ptr<const Binding> binding_or_empty(
    std::shared_ptr<const Binding> b) {
    static const auto empty = std::make_shared<const Binding>();
    return b ? std::move(b) : empty;
}

// mu^{nn}_a + 2 mu^{na}_n, the divergence combination shared by the mass
// and potential sides.
std::array<Coeff, 3> divergence_terms(const KillingTensor& mu) {
    Coeff trace = cf_add(cf_add(mu.comp(1, 1), mu.comp(2, 2)), mu.comp(3, 3));
    std::array<Coeff, 3> T;
    for (int a = 1; a <= 3; ++a) {
        Coeff div;
        for (int n = 1; n <= 3; ++n) div = cf_add(div, mu.comp(a, n).deriv(n));
        T[a - 1] = cf_add(trace.deriv(a), cf_scale(div, CRat(2)));
    }
    return T;
}

double mag(const CJet<double>& j) {
    return std::max(std::abs(j.re.value()), std::abs(j.im.value()));
}

Rat mag(const CJet<Rat>& j) {
    auto rabs = [](const Rat& v) { return v < 0 ? Rat(-v) : v; };
    return std::max(rabs(j.re.value()), rabs(j.im.value()));
}

// Evaluates paired term lists (t1_a vs t2_a): doubles get the defect scaled
// by 1 + the largest competing term at the point, rationals stay raw.
double paired_residual(const std::array<Coeff, 3>& t1,
                       const std::array<Coeff, 3>& t2,
                       const std::vector<P3d>& pts, P3d* worst) {
    std::array<Coeff, 3> d;
    for (int a = 0; a < 3; ++a) d[a] = cf_sub(t1[a], t2[a]);
    double best = 0.0;
    bool first = true;
    for (const auto& p : pts) {
        double defect = 0.0, scale = 1.0;
        for (int a = 0; a < 3; ++a) {
            if (!t1[a].is_zero())
                scale = std::max(scale, 1.0 + mag(t1[a].eval(p, 0)));
            if (!t2[a].is_zero())
                scale = std::max(scale, 1.0 + mag(t2[a].eval(p, 0)));
            if (!d[a].is_zero()) defect = std::max(defect, mag(d[a].eval(p, 0)));
        }
        const double r = defect / scale;
        if (first || r > best) {
            best = std::max(best, r);
            if (worst) *worst = p;
            first = false;
        }
    }
    return best;
}

Rat paired_residual(const std::array<Coeff, 3>& t1,
                    const std::array<Coeff, 3>& t2,
                    const std::vector<P3q>& pts) {
    std::array<Coeff, 3> d;
    for (int a = 0; a < 3; ++a) d[a] = cf_sub(t1[a], t2[a]);
    Rat best(0);
    for (const auto& dd : d) {
        if (dd.is_zero()) continue;
        for (const auto& p : pts) best = std::max(best, mag(dd.eval(p, 0)));
    }
    return best;
}

FieldPtr require(const FieldPtr& e, const char* what) {
    if (!e) throw std::invalid_argument(std::string(what) + " is not set");
    return e;
}

FieldPtr derived_f(const DeterminingSystem& s) {
    if (s.f) return s.f;
    return f_div(f_num(1), require(s.M, "f (or M)"));
}

FieldPtr derived_V(const DeterminingSystem& s) {
    if (s.V) return s.V;
    return f_div(require(s.Mt, "V (or Mt)"), require(s.M, "V (or M)"));
}

FieldPtr derived_eta(const DeterminingSystem& s) {
    if (s.eta) return s.eta;
    return f_sub(f_div(f_mul(require(s.N, "eta (or N)"),
                             require(s.Mt, "eta (or Mt)")),
                       require(s.M, "eta (or M)")),
                 require(s.Nt, "eta (or Nt)"));
}

struct TermPair {
    std::array<Coeff, 3> t1, t2;
};

TermPair mass_terms(const DeterminingSystem& s) {
    auto b = binding_or_empty(s.binding);
    Coeff fc = Coeff::from_field(derived_f(s), b);
    auto T = divergence_terms(s.mu);
    TermPair out;
    for (int a = 1; a <= 3; ++a) {
        out.t1[a - 1] = cf_mul(T[a - 1], fc);
        Coeff sum;
        for (int n = 1; n <= 3; ++n)
            sum = cf_add(sum, cf_mul(s.mu.comp(a, n), fc.deriv(n)));
        out.t2[a - 1] = cf_scale(sum, CRat(5));
    }
    return out;
}

TermPair potential_terms(const DeterminingSystem& s) {
    auto b = binding_or_empty(s.binding);
    Coeff fc = Coeff::from_field(derived_f(s), b);
    Coeff vc = Coeff::from_field(derived_V(s), b);
    Coeff ec = Coeff::from_field(derived_eta(s), b);
    TermPair out;
    for (int a = 1; a <= 3; ++a) {
        Coeff sum;
        for (int n = 1; n <= 3; ++n)
            sum = cf_add(sum, cf_mul(s.mu.comp(a, n), vc.deriv(n)));
        out.t1[a - 1] = sum;
        out.t2[a - 1] = cf_mul(fc, ec.deriv(a));
    }
    return out;
}

std::array<Coeff, 3> homogeneity_defect(const FieldPtr& u,
                                        std::shared_ptr<const Binding> b,
                                        const Rat& weight) {
    auto bind = binding_or_empty(std::move(b));
    Coeff uc = Coeff::from_field(require(u, "u"), bind);
    return {euler_defect(uc, weight, bind), Coeff(), Coeff()};
}

std::array<Coeff, 3> curl_defects(const CoeffMatrix& A, const FieldPtr& M,
                                  std::shared_ptr<const Binding> b) {
    auto bind = binding_or_empty(std::move(b));
    Coeff mc = Coeff::from_field(require(M, "M"), bind);
    std::array<Coeff, 3> B;
    for (int a = 0; a < 3; ++a)
        for (int n = 0; n < 3; ++n)
            B[a] = cf_add(B[a], cf_mul(A[a][n], mc.deriv(n + 1)));
    // independent pairs (1,2), (1,3), (2,3)
    return {cf_sub(B[0].deriv(2), B[1].deriv(1)),
            cf_sub(B[0].deriv(3), B[2].deriv(1)),
            cf_sub(B[1].deriv(3), B[2].deriv(2))};
}

template <class Pt, class S>
S raw_max(const std::array<Coeff, 3>& ds, const std::vector<Pt>& pts) {
    S best(0);
    for (const auto& d : ds) {
        if (d.is_zero()) continue;
        for (const auto& p : pts) best = std::max(best, mag(d.eval(p, 0)));
    }
    return best;
}

}  // namespace

DeterminingSystem linearized_system(KillingTensor mu, FieldPtr M, FieldPtr N,
                                    FieldPtr Mt, FieldPtr Nt,
                                    std::shared_ptr<const Binding> b,
                                    SymmetryTag tag) {
    DeterminingSystem s;
    s.mu = std::move(mu);
    s.M = std::move(M);
    s.N = std::move(N);
    s.Mt = std::move(Mt);
    s.Nt = std::move(Nt);
    s.binding = binding_or_empty(std::move(b));
    s.tag = tag;
    s.f = f_div(f_num(1), require(s.M, "M"));
    if (s.Mt) s.V = f_div(s.Mt, s.M);
    if (s.N && s.Mt && s.Nt)
        s.eta = f_sub(f_div(f_mul(s.N, s.Mt), s.M), s.Nt);
    return s;
}

double residual_mass(const DeterminingSystem& s, const std::vector<P3d>& pts,
                   P3d* worst) {
    auto t = mass_terms(s);
    return paired_residual(t.t1, t.t2, pts, worst);
}

Rat residual_mass(const DeterminingSystem& s, const std::vector<P3q>& pts) {
    auto t = mass_terms(s);
    return paired_residual(t.t1, t.t2, pts);
}

double residual_potential(const DeterminingSystem& s, const std::vector<P3d>& pts,
                   P3d* worst) {
    auto t = potential_terms(s);
    return paired_residual(t.t1, t.t2, pts, worst);
}

Rat residual_potential(const DeterminingSystem& s, const std::vector<P3q>& pts) {
    auto t = potential_terms(s);
    return paired_residual(t.t1, t.t2, pts);
}

double residual_mass_linear(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                    std::shared_ptr<const Binding> b,
                    const std::vector<P3d>& pts, P3d* worst) {
    auto t = mass_rows(mu, require(M, "M"), N, std::move(b));
    return paired_residual(t.t1, t.t2, pts, worst);
}

Rat residual_mass_linear(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                 std::shared_ptr<const Binding> b, const std::vector<P3q>& pts) {
    auto t = mass_rows(mu, require(M, "M"), N, std::move(b));
    return paired_residual(t.t1, t.t2, pts);
}

MassRows mass_rows(const KillingTensor& mu, FieldPtr M, FieldPtr N,
                 std::shared_ptr<const Binding> b) {
    auto bind = binding_or_empty(std::move(b));
    Coeff mc = M ? Coeff::from_field(M, bind) : Coeff();
    Coeff nc = N ? Coeff::from_field(N, bind) : Coeff();
    auto T = divergence_terms(mu);
    MassRows out;
    for (int a = 1; a <= 3; ++a) {
        out.t1[a - 1] = mc.is_zero() ? Coeff() : cf_mul(T[a - 1], mc);
        Coeff sum = nc.is_zero() ? Coeff() : nc.deriv(a);
        if (!mc.is_zero())
            for (int n = 1; n <= 3; ++n)
                sum = cf_add(sum, cf_mul(mu.comp(a, n), mc.deriv(n)));
        out.t2[a - 1] = cf_neg(cf_scale(sum, CRat(5)));
    }
    return out;
}

Coeff euler_defect(const Coeff& u, const Rat& weight,
                   std::shared_ptr<const Binding> b) {
    auto bind = binding_or_empty(std::move(b));
    Coeff acc = cf_scale(u, CRat(weight));
    for (int a = 1; a <= 3; ++a)
        acc = cf_add(acc, cf_mul(Coeff::from_field(coord(a), bind), u.deriv(a)));
    return acc;
}

double residual_homogeneity(FieldPtr u, std::shared_ptr<const Binding> b,
                            const Rat& weight, const std::vector<P3d>& pts) {
    return raw_max<P3d, double>(homogeneity_defect(u, std::move(b), weight), pts);
}

Rat residual_homogeneity(FieldPtr u, std::shared_ptr<const Binding> b,
                         const Rat& weight, const std::vector<P3q>& pts) {
    return raw_max<P3q, Rat>(homogeneity_defect(u, std::move(b), weight), pts);
}

ConstantFit homogeneity_constant(FieldPtr u, std::shared_ptr<const Binding> b,
                                 const Rat& weight,
                                 const std::vector<P3d>& pts) {
    auto d = homogeneity_defect(u, std::move(b), weight)[0];
    ConstantFit fit;
    if (pts.empty()) return fit;
    if (d.is_zero()) return fit;
    fit.constant = d.eval(pts.front(), 0).re.value();
    for (const auto& p : pts) {
        auto j = d.eval(p, 0);
        fit.deviation = std::max(
            fit.deviation, std::max(std::abs(j.re.value() - fit.constant),
                                    std::abs(j.im.value())));
    }
    return fit;
}

Coeff reconstruct_N(KillingFamily fam, const FamilyParams& p, FieldPtr M,
                    std::shared_ptr<const Binding> b) {
    auto bind = binding_or_empty(std::move(b));
    Coeff mc = Coeff::from_field(require(M, "M"), bind);
    auto x = [&bind](int a) { return Coeff::from_field(coord(a), bind); };
    auto eps = [](int a, int bb, int c) {
        const int v = (a - bb) * (bb - c) * (c - a);
        return v > 0 ? 1 : v < 0 ? -1 : 0;
    };
    switch (fam) {
        case KillingFamily::constant: {
            Coeff acc;
            for (int a = 1; a <= 3; ++a)
                for (int bb = 1; bb <= 3; ++bb) {
                    const Rat& lam = p.mat[a - 1][bb - 1];
                    if (lam == Rat(0)) continue;
                    acc = cf_add(acc, cf_scale(cf_mul(x(a), mc.deriv(bb)),
                                               CRat(lam)));
                }
            return cf_scale(acc, CRat(rat(1, 2)));
        }
        case KillingFamily::linear: {
            FieldPtr r2 = f_add(f_add(f_pow(coord(1), 2), f_pow(coord(2), 2)),
                                f_pow(coord(3), 2));
            Coeff r2c = Coeff::from_field(r2, bind);
            Coeff acc;
            for (int bb = 1; bb <= 3; ++bb) {
                if (!(p.vec[bb - 1] == Rat(0)))
                    acc = cf_add(acc, cf_scale(cf_mul(r2c, mc.deriv(bb)),
                                               CRat(p.vec[bb - 1])));
                for (int c = 1; c <= 3; ++c)
                    for (int d = 1; d <= 3; ++d) {
                        if (eps(bb, c, d) == 0) continue;
                        for (int n = 1; n <= 3; ++n) {
                            const Rat lam = Rat(eps(bb, c, d)) * p.mat[c - 1][n - 1];
                            if (lam == Rat(0)) continue;
                            acc = cf_add(
                                acc, cf_scale(cf_mul(cf_mul(x(n), x(d)),
                                                     mc.deriv(bb)),
                                              CRat(lam)));
                        }
                    }
            }
            return acc;
        }
        default:
            throw std::invalid_argument(
                "N reconstruction supports only the constant and linear families");
    }
}

CoeffMatrix reduced_matrix(const KillingTensor& mu, const Vec3q& lambda) {
    CoeffMatrix A;
    for (int a = 1; a <= 3; ++a)
        for (int bb = 1; bb <= 3; ++bb) {
            A[a - 1][bb - 1] = mu.comp(a, bb);
            if (!(lambda[a - 1] == Rat(0))) {
                Coeff xb = Coeff::from_field(coord(bb), mu.binding());
                A[a - 1][bb - 1] = cf_sub(A[a - 1][bb - 1],
                                          cf_scale(xb, CRat(lambda[a - 1])));
            }
        }
    return A;
}

double curl_consequence(const CoeffMatrix& A, FieldPtr M,
                        std::shared_ptr<const Binding> b,
                        const std::vector<P3d>& pts) {
    return raw_max<P3d, double>(curl_defects(A, M, std::move(b)), pts);
}

Rat curl_consequence(const CoeffMatrix& A, FieldPtr M,
                     std::shared_ptr<const Binding> b,
                     const std::vector<P3q>& pts) {
    return raw_max<P3q, Rat>(curl_defects(A, M, std::move(b)), pts);
}

}  // namespace pdm
