#include "pdmsym/killing.hpp"

#include <stdexcept>

namespace pdm {

namespace {

int eps(int a, int b, int c) {
    const int v = (a - b) * (b - c) * (c - a);
    return v > 0 ? 1 : v < 0 ? -1 : 0;
}

void check_sym(const Mat3q& m, const char* what) {
    for (int a = 0; a < 3; ++a)
        for (int b = a + 1; b < 3; ++b)
            if (!(m[a][b] == m[b][a]))
                throw std::invalid_argument(std::string(what) +
                                            ": matrix must be symmetric");
}

void check_matrix(const Mat3q& m, const char* what) {
    check_sym(m, what);
    if (!(m[0][0] + m[1][1] + m[2][2] == Rat(0)))
        throw std::invalid_argument(std::string(what) +
                                    ": matrix must be traceless");
}

bool vec_zero(const Vec3q& v) {
    return v[0] == Rat(0) && v[1] == Rat(0) && v[2] == Rat(0);
}

bool mat_zero(const Mat3q& m) {
    for (const auto& row : m)
        for (const auto& v : row)
            if (!(v == Rat(0))) return false;
    return true;
}

// Sparse polynomial accumulator keyed by exponent triple; the basis tensors
// are assembled here and emitted as expression trees once per component.
using Poly = std::map<std::array<int, 3>, Rat>;

void addmon(Poly& p, const Rat& coef, std::initializer_list<int> axes) {
    if (coef == Rat(0)) return;
    std::array<int, 3> e{0, 0, 0};
    for (int a : axes) e[a - 1] += 1;
    p[e] += coef;
}

FieldPtr emit(const Poly& p) {
    FieldPtr acc;
    for (const auto& [e, coef] : p) {
        if (coef == Rat(0)) continue;
        FieldPtr term;
        for (int a = 0; a < 3; ++a) {
            if (e[a] == 0) continue;
            FieldPtr fac = f_name("x" + std::to_string(a + 1));
            if (e[a] > 1) fac = f_pow(fac, e[a]);
            term = term ? f_mul(term, fac) : fac;
        }
        if (!term)
            term = f_num(coef);
        else if (coef == Rat(-1))
            term = f_neg(term);
        else if (!(coef == Rat(1)))
            term = f_mul(f_num(coef), term);
        acc = acc ? f_add(acc, term) : term;
    }
    return acc;
}

const Vec3q& need_vector(const KillingParams& p, int n) {
    auto it = p.vectors.find(n);
    if (it == p.vectors.end())
        throw std::invalid_argument("basis tensor " + std::to_string(n) +
                                    " needs a vector parameter");
    return it->second;
}

const Mat3q& need_matrix(const KillingParams& p, int n) {
    auto it = p.matrices.find(n);
    if (it == p.matrices.end())
        throw std::invalid_argument("basis tensor " + std::to_string(n) +
                                    " needs a matrix parameter");
    return it->second;
}

// r^2 times an existing monomial list: add the three diagonal continuations.
void add_r2(Poly& p, const Rat& coef, std::initializer_list<int> axes) {
    for (int n = 1; n <= 3; ++n) {
        std::array<int, 3> e{0, 0, 0};
        for (int a : axes) e[a - 1] += 1;
        e[n - 1] += 2;
        if (coef == Rat(0)) continue;
        p[e] += coef;
    }
}

Poly component(int n, const KillingParams& par, int a, int b) {
    Poly p;
    switch (n) {
        case 1: {
            const Mat3q& m = need_matrix(par, 1);
            addmon(p, m[a - 1][b - 1], {});
            break;
        }
        case 2: {
            const Vec3q& v = need_vector(par, 2);
            addmon(p, v[a - 1], {b});
            addmon(p, v[b - 1], {a});
            break;
        }
        case 3: {
            const Mat3q& m = need_matrix(par, 3);
            for (int c = 1; c <= 3; ++c)
                for (int d = 1; d <= 3; ++d) {
                    addmon(p, Rat(eps(a, c, d)) * m[c - 1][b - 1], {d});
                    addmon(p, Rat(eps(b, c, d)) * m[c - 1][a - 1], {d});
                }
            break;
        }
        case 4: {
            const Vec3q& v = need_vector(par, 4);
            for (int c = 1; c <= 3; ++c)
                for (int d = 1; d <= 3; ++d) {
                    addmon(p, Rat(eps(b, c, d)) * v[d - 1], {a, c});
                    addmon(p, Rat(eps(a, c, d)) * v[d - 1], {b, c});
                }
            break;
        }
        case 5:
            addmon(p, par.k, {a, b});
            break;
        case 6: {
            const Mat3q& m = need_matrix(par, 6);
            add_r2(p, m[a - 1][b - 1], {});
            for (int c = 1; c <= 3; ++c) {
                addmon(p, -m[b - 1][c - 1], {a, c});
                addmon(p, -m[a - 1][c - 1], {b, c});
            }
            break;
        }
        case 7: {
            const Vec3q& v = need_vector(par, 7);
            add_r2(p, v[b - 1], {a});
            add_r2(p, v[a - 1], {b});
            for (int c = 1; c <= 3; ++c) addmon(p, Rat(-4) * v[c - 1], {a, b, c});
            break;
        }
        case 8: {
            const Mat3q& m = need_matrix(par, 8);
            for (int c = 1; c <= 3; ++c)
                for (int d = 1; d <= 3; ++d)
                    for (int k = 1; k <= 3; ++k) {
                        addmon(p, Rat(2 * eps(b, c, d)) * m[d - 1][k - 1],
                               {a, c, k});
                        addmon(p, Rat(2 * eps(a, c, d)) * m[d - 1][k - 1],
                               {b, c, k});
                    }
            for (int c = 1; c <= 3; ++c)
                for (int k = 1; k <= 3; ++k)
                    add_r2(p,
                           Rat(-eps(a, c, k)) * m[b - 1][k - 1] +
                               Rat(-eps(b, c, k)) * m[a - 1][k - 1],
                           {c});
            break;
        }
        case 9: {
            const Mat3q& m = need_matrix(par, 9);
            for (int i = 1; i <= 3; ++i)
                for (int j = 1; j <= 3; ++j)
                    addmon(p, m[a - 1][b - 1], {i, i, j, j});
            for (int c = 1; c <= 3; ++c) {
                add_r2(p, Rat(-2) * m[b - 1][c - 1], {a, c});
                add_r2(p, Rat(-2) * m[a - 1][c - 1], {b, c});
            }
            for (int c = 1; c <= 3; ++c)
                for (int d = 1; d <= 3; ++d) {
                    addmon(p, Rat(4) * m[c - 1][d - 1], {a, b, c, d});
                    if (a == b) add_r2(p, m[c - 1][d - 1], {c, d});
                }
            break;
        }
        default:
            throw std::invalid_argument("basis tensor index out of range");
    }
    return p;
}

std::shared_ptr<const Binding> binding_or_empty(
    std::shared_ptr<const Binding> b) {
    static const auto empty = std::make_shared<const Binding>();
    return b ? std::move(b) : empty;
}

KillingTensor pack(const std::array<FieldPtr, 6>& tri, FieldPtr g,
                   std::shared_ptr<const Binding> b) {
    auto bind = binding_or_empty(std::move(b));
    std::array<Coeff, 6> c;
    // diagonal entries sit at packed slots 0, 3, 5
    for (int k = 0; k < 6; ++k) {
        FieldPtr e = tri[k];
        if (g && (k == 0 || k == 3 || k == 5)) e = e ? f_add(e, g) : g;
        if (e) c[k] = Coeff::from_field(e, bind);
    }
    return KillingTensor(std::move(c), std::move(g), std::move(bind));
}

constexpr int kPack[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};

}  // namespace

void KillingParams::set_vector(int n, const Vec3q& v) {
    if (n != 2 && n != 4 && n != 7)
        throw std::invalid_argument("basis tensor " + std::to_string(n) +
                                    " does not take a vector parameter");
    vectors[n] = v;
}

void KillingParams::set_matrix(int n, const Mat3q& m) {
    if (n != 1 && n != 3 && n != 6 && n != 8 && n != 9)
        throw std::invalid_argument("basis tensor " + std::to_string(n) +
                                    " does not take a matrix parameter");
    check_matrix(m, "killing parameters");
    matrices[n] = m;
}

void KillingParams::set_scalar(const Rat& v) { k = v; }

KillingTensor::KillingTensor(std::array<Coeff, 6> packed, FieldPtr conformal,
                             std::shared_ptr<const Binding> binding)
    : c_(std::move(packed)),
      conformal_(std::move(conformal)),
      binding_(std::move(binding)) {}

const Coeff& KillingTensor::comp(int a, int b) const {
    return c_[kPack[a - 1][b - 1]];
}

bool KillingTensor::rational_capable() const {
    for (const auto& c : c_)
        if (!c.is_zero() && !c.rational_capable()) return false;
    return true;
}

KillingTensor basis_tensor(int n, const KillingParams& p, FieldPtr g,
                           std::shared_ptr<const Binding> b) {
    if (n < 0 || n > 9)
        throw std::invalid_argument("basis tensor index out of range");
    std::array<FieldPtr, 6> tri{};
    if (n != 0) {
        int k = 0;
        for (int a = 1; a <= 3; ++a)
            for (int bb = a; bb <= 3; ++bb) tri[k++] = emit(component(n, p, a, bb));
    }
    return pack(tri, std::move(g), std::move(b));
}

KillingTensor family_tensor(KillingFamily fam, const FamilyParams& p,
                            FieldPtr g, std::shared_ptr<const Binding> b) {
    const bool has_vec = !vec_zero(p.vec);
    const bool has_mat = !mat_zero(p.mat);
    const bool has_shift = !(p.sigma == Rat(0)) || !(p.screw == Rat(0));
    auto unsupported = [](const char* fam_name) {
        throw std::invalid_argument(std::string("parameter outside the ") +
                                    fam_name + " family support");
    };

    std::array<Poly, 6> tri;
    auto at = [&tri](int a, int bb) -> Poly& { return tri[kPack[a - 1][bb - 1]]; };

    switch (fam) {
        case KillingFamily::constant: {
            if (has_vec || has_shift) unsupported("constant");
            if (has_mat) check_sym(p.mat, "constant family");
            for (int a = 1; a <= 3; ++a)
                for (int bb = a; bb <= 3; ++bb)
                    addmon(at(a, bb), p.mat[a - 1][bb - 1], {});
            break;
        }
        case KillingFamily::linear: {
            if (has_shift) unsupported("linear");
            if (has_mat) check_sym(p.mat, "linear family");
            for (int a = 1; a <= 3; ++a)
                for (int bb = a; bb <= 3; ++bb) {
                    addmon(at(a, bb), p.vec[a - 1], {bb});
                    addmon(at(a, bb), p.vec[bb - 1], {a});
                    for (int c = 1; c <= 3; ++c)
                        for (int d = 1; d <= 3; ++d) {
                            addmon(at(a, bb),
                                   Rat(eps(a, c, d)) * p.mat[c - 1][bb - 1], {d});
                            addmon(at(a, bb),
                                   Rat(eps(bb, c, d)) * p.mat[c - 1][a - 1], {d});
                        }
                }
            break;
        }
        case KillingFamily::quadratic: {
            if (has_shift) unsupported("quadratic");
            if (has_mat) check_sym(p.mat, "quadratic family");
            for (int a = 1; a <= 3; ++a)
                for (int bb = a; bb <= 3; ++bb) {
                    for (int c = 1; c <= 3; ++c)
                        for (int d = 1; d <= 3; ++d) {
                            addmon(at(a, bb), Rat(eps(bb, c, d)) * p.vec[d - 1],
                                   {a, c});
                            addmon(at(a, bb), Rat(eps(a, c, d)) * p.vec[d - 1],
                                   {bb, c});
                        }
                    add_r2(at(a, bb), p.mat[a - 1][bb - 1], {});
                    for (int c = 1; c <= 3; ++c) {
                        addmon(at(a, bb), -p.mat[bb - 1][c - 1], {a, c});
                        addmon(at(a, bb), -p.mat[a - 1][c - 1], {bb, c});
                    }
                    if (a == bb)
                        for (int c = 1; c <= 3; ++c)
                            for (int d = 1; d <= 3; ++d)
                                addmon(at(a, bb), Rat(-2) * p.mat[c - 1][d - 1],
                                       {c, d});
                }
            break;
        }
        case KillingFamily::shift: {
            if (has_mat) check_sym(p.mat, "shift family");
            for (int al = 1; al <= 2; ++al)
                for (int be = al; be <= 2; ++be) {
                    addmon(at(al, be), p.mat[al - 1][be - 1], {});
                    addmon(at(al, be), p.vec[al - 1], {be});
                    addmon(at(al, be), p.vec[be - 1], {al});
                    if (al == be) {
                        addmon(at(al, be), p.sigma, {1, 1});
                        addmon(at(al, be), p.sigma, {2, 2});
                    }
                    addmon(at(al, be), -p.sigma, {al, be});
                }
            for (int al = 1; al <= 2; ++al) {
                for (int c = 1; c <= 3; ++c)
                    addmon(at(3, al), Rat(eps(3, al, c)) * p.screw, {c});
                addmon(at(3, al), p.mat[2][al - 1], {});
                addmon(at(3, al), p.vec[2], {al});
            }
            addmon(at(3, 3), p.mat[2][2], {});
            break;
        }
    }

    std::array<FieldPtr, 6> out{};
    for (int k = 0; k < 6; ++k) out[k] = emit(tri[k]);
    return pack(out, std::move(g), std::move(b));
}

namespace {

// The ten independent defect components of the first-order condition, shared
// by both residual overloads.
std::vector<Coeff> defects(const KillingTensor& t) {
    const CRat two(2), five(5);
    Coeff trace = cf_add(cf_add(t.comp(1, 1), t.comp(2, 2)), t.comp(3, 3));
    std::array<Coeff, 3> T;
    for (int c = 1; c <= 3; ++c) {
        Coeff div;
        for (int n = 1; n <= 3; ++n) div = cf_add(div, t.comp(c, n).deriv(n));
        T[c - 1] = cf_add(trace.deriv(c), cf_scale(div, two));
    }
    std::vector<Coeff> out;
    for (int a = 1; a <= 3; ++a)
        for (int b = a; b <= 3; ++b)
            for (int c = b; c <= 3; ++c) {
                Coeff s = cf_add(cf_add(t.comp(a, b).deriv(c), t.comp(a, c).deriv(b)),
                                 t.comp(b, c).deriv(a));
                Coeff r = cf_scale(s, five);
                if (a == b) r = cf_sub(r, T[c - 1]);
                if (b == c) r = cf_sub(r, T[a - 1]);
                if (a == c) r = cf_sub(r, T[b - 1]);
                out.push_back(r);
            }
    return out;
}

}  // namespace

double killing_residual(const KillingTensor& t, const std::vector<P3d>& pts) {
    double worst = 0.0;
    for (const auto& r : defects(t)) {
        if (r.is_zero()) continue;
        for (const auto& p : pts) {
            auto j = r.eval(p, 0);
            worst = std::max(worst, std::abs(j.re.value()));
            worst = std::max(worst, std::abs(j.im.value()));
        }
    }
    return worst;
}

Rat killing_residual(const KillingTensor& t, const std::vector<P3q>& pts) {
    Rat worst(0);
    auto rabs = [](const Rat& v) { return v < 0 ? Rat(-v) : v; };
    for (const auto& r : defects(t)) {
        if (r.is_zero()) continue;
        for (const auto& p : pts) {
            auto j = r.eval(p, 0);
            worst = std::max(worst, rabs(j.re.value()));
            worst = std::max(worst, rabs(j.im.value()));
        }
    }
    return worst;
}

}  // namespace pdm
