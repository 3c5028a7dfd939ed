#include "pdmsym/solver.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace pdm {

namespace {

using json = nlohmann::json;

// Per-column evaluators: the two term groups of the linear mass equation for
// a single basis element, M block first, then the N block.
std::vector<MassRows> column_rows(const KillingTensor& mu, const Ansatz& a,
                                 std::shared_ptr<const Binding> b) {
    std::vector<MassRows> cols;
    cols.reserve(a.basis_M.size() + a.basis_N.size());
    for (const auto& phi : a.basis_M) cols.push_back(mass_rows(mu, phi, nullptr, b));
    for (const auto& psi : a.basis_N) cols.push_back(mass_rows(mu, nullptr, psi, b));
    return cols;
}

std::vector<Coeff> column_defects(const KillingTensor& mu, const Ansatz& a,
                                  std::shared_ptr<const Binding> b) {
    std::vector<Coeff> flat;
    auto cols = column_rows(mu, a, std::move(b));
    flat.reserve(cols.size() * 3);
    for (const auto& c : cols)
        for (int k = 0; k < 3; ++k) flat.push_back(cf_sub(c.t1[k], c.t2[k]));
    return flat;
}

// Homogeneity evaluators per column of one block, or empty when the block has
// no weight.
std::vector<Coeff> block_euler(const std::vector<FieldPtr>& basis,
                               const std::optional<Rat>& weight,
                               std::shared_ptr<const Binding> b) {
    std::vector<Coeff> out;
    if (!weight) return out;
    out.reserve(basis.size());
    for (const auto& u : basis)
        out.push_back(euler_defect(Coeff::from_field(u, b), *weight, b));
    return out;
}

template <typename Pt>
double eval_re(const Coeff& c, const Pt& p) {
    if (c.is_zero()) return 0.0;
    return c.eval(p, 0).re.value();
}

Rat eval_rat(const Coeff& c, const P3q& p) {
    if (c.is_zero()) return Rat(0);
    return c.eval(p, 0).re.value();
}

void check_shape(const Ansatz& a, std::size_t npts) {
    const int cols = a.cols();
    if (cols == 0)
        throw std::invalid_argument("assemble: ansatz has no basis elements");
    if (static_cast<int>(npts) < cols) {
        std::ostringstream os;
        os << "assemble: " << npts << " points give " << 3 * npts
           << " equation rows for " << cols << " columns; need at least "
           << 3 * cols;
        throw std::invalid_argument(os.str());
    }
}

int rank_over_rationals(std::vector<std::vector<Rat>>& rows, int cols) {
    int rank = 0;
    const int nrows = static_cast<int>(rows.size());
    for (int c = 0; c < cols && rank < nrows; ++c) {
        int pivot = -1;
        for (int r = rank; r < nrows; ++r)
            if (rows[r][c] != 0) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(rows[rank], rows[pivot]);
        for (int r = rank + 1; r < nrows; ++r) {
            if (rows[r][c] == 0) continue;
            Rat factor = rows[r][c] / rows[rank][c];
            for (int k = c; k < cols; ++k)
                rows[r][k] -= factor * rows[rank][k];
        }
        ++rank;
    }
    return rank;
}

Rat json_rat(const json& v, const std::string& where) {
    if (v.is_number_integer()) return rat(v.get<long>());
    if (v.is_string()) return parse_rat(v.get<std::string>());
    throw std::runtime_error(where + ": expected an integer or rational string");
}

KillingFamily family_from_name(const std::string& s, const std::string& origin) {
    if (s == "constant") return KillingFamily::constant;
    if (s == "linear") return KillingFamily::linear;
    if (s == "quadratic") return KillingFamily::quadratic;
    if (s == "shift") return KillingFamily::shift;
    throw std::runtime_error(origin + ": unknown tensor_family '" + s + "'");
}

std::vector<FieldPtr> parse_basis(const json& arr, const std::string& origin,
                                  const char* key) {
    std::vector<FieldPtr> out;
    if (!arr.is_array())
        throw std::runtime_error(origin + ": " + key + " must be an array");
    for (const auto& e : arr) {
        if (!e.is_string())
            throw std::runtime_error(origin + ": " + key +
                                     " entries must be expression strings");
        const auto src = e.get<std::string>();
        try {
            out.push_back(parse_field(src));
        } catch (const ParseError& err) {
            throw std::runtime_error(origin + ": " + key + " entry '" + src +
                                     "': " + err.what());
        }
    }
    return out;
}

}  // namespace

LinearSystem assemble(const KillingTensor& mu, const Ansatz& a,
                      std::shared_ptr<const Binding> b,
                      const std::vector<P3d>& pts) {
    check_shape(a, pts.size());
    const int cols = a.cols();
    const int npts = static_cast<int>(pts.size());
    auto defects = column_defects(mu, a, b);
    auto hom_m = block_euler(a.basis_M, a.weight_M, b);
    auto hom_n = block_euler(a.basis_N, a.weight_N, b);

    const int eq_rows = 3 * npts;
    const int hom_rows = npts * ((hom_m.empty() ? 0 : 1) + (hom_n.empty() ? 0 : 1));
    LinearSystem L;
    L.m_cols = static_cast<int>(a.basis_M.size());
    L.A = Eigen::MatrixXd::Zero(eq_rows + hom_rows, cols);

    for (int pi = 0; pi < npts; ++pi)
        for (int i = 0; i < cols; ++i)
            for (int k = 0; k < 3; ++k)
                L.A(3 * pi + k, i) = eval_re(defects[3 * i + k], pts[pi]);

    int base = eq_rows;
    if (!hom_m.empty()) {
        for (int pi = 0; pi < npts; ++pi)
            for (std::size_t i = 0; i < hom_m.size(); ++i)
                L.A(base + pi, static_cast<int>(i)) = eval_re(hom_m[i], pts[pi]);
        base += npts;
    }
    if (!hom_n.empty())
        for (int pi = 0; pi < npts; ++pi)
            for (std::size_t j = 0; j < hom_n.size(); ++j)
                L.A(base + pi, L.m_cols + static_cast<int>(j)) =
                    eval_re(hom_n[j], pts[pi]);
    return L;
}

NullspaceResult nullspace(const LinearSystem& L, double tol) {
    const int cols = static_cast<int>(L.A.cols());
    NullspaceResult r;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(L.A, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    r.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax <= 1e-12) {
        // every row vanished up to roundoff: the system says nothing, so
        // report full dimension rather than ranking noise
        r.degenerate = true;
        r.dimension = cols;
        for (int i = 0; i < cols; ++i) {
            std::vector<double> e(cols, 0.0);
            e[i] = 1.0;
            r.basis.push_back(std::move(e));
        }
        return r;
    }
    int dim = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) < tol * smax) ++dim;
    r.dimension = dim;
    const auto& V = svd.matrixV();
    for (int k = 0; k < dim; ++k) {
        std::vector<double> v(cols);
        for (int i = 0; i < cols; ++i) v[i] = V(i, cols - dim + k);
        r.basis.push_back(std::move(v));
    }
    return r;
}

int rational_nullity(const KillingTensor& mu, const Ansatz& a,
                     std::shared_ptr<const Binding> b,
                     const std::vector<P3q>& pts) {
    const int cols = a.cols();
    if (cols == 0)
        throw std::invalid_argument("rational_nullity: ansatz has no basis elements");
    if (3 * static_cast<int>(pts.size()) < 2 * cols) {
        std::ostringstream os;
        os << "rational_nullity: " << pts.size() << " points cannot supply "
           << 2 * cols << " rows";
        throw std::invalid_argument(os.str());
    }
    auto defects = column_defects(mu, a, b);
    auto hom_m = block_euler(a.basis_M, a.weight_M, b);
    auto hom_n = block_euler(a.basis_N, a.weight_N, b);

    std::vector<std::vector<Rat>> rows;
    for (const auto& p : pts)
        for (int k = 0; k < 3; ++k) {
            std::vector<Rat> row(cols, Rat(0));
            for (int i = 0; i < cols; ++i) row[i] = eval_rat(defects[3 * i + k], p);
            rows.push_back(std::move(row));
        }
    const int m_cols = static_cast<int>(a.basis_M.size());
    for (const auto& p : pts) {
        if (!hom_m.empty()) {
            std::vector<Rat> row(cols, Rat(0));
            for (std::size_t i = 0; i < hom_m.size(); ++i)
                row[i] = eval_rat(hom_m[i], p);
            rows.push_back(std::move(row));
        }
        if (!hom_n.empty()) {
            std::vector<Rat> row(cols, Rat(0));
            for (std::size_t j = 0; j < hom_n.size(); ++j)
                row[m_cols + j] = eval_rat(hom_n[j], p);
            rows.push_back(std::move(row));
        }
    }
    return cols - rank_over_rationals(rows, cols);
}

double vector_residual(const KillingTensor& mu, const Ansatz& a,
                       std::shared_ptr<const Binding> b,
                       const std::vector<double>& coeffs,
                       const std::vector<P3d>& pts) {
    const int cols = a.cols();
    if (static_cast<int>(coeffs.size()) != cols)
        throw std::invalid_argument("vector_residual: coefficient count mismatch");
    auto colrows = column_rows(mu, a, std::move(b));
    double best = 0.0;
    for (const auto& p : pts) {
        double defect = 0.0, scale = 1.0;
        for (int k = 0; k < 3; ++k) {
            double t1 = 0.0, t2 = 0.0;
            for (int i = 0; i < cols; ++i) {
                t1 += coeffs[i] * eval_re(colrows[i].t1[k], p);
                t2 += coeffs[i] * eval_re(colrows[i].t2[k], p);
            }
            scale = std::max(scale, 1.0 + std::abs(t1));
            scale = std::max(scale, 1.0 + std::abs(t2));
            defect = std::max(defect, std::abs(t1 - t2));
        }
        best = std::max(best, defect / scale);
    }
    return best;
}

std::vector<SolvabilityRow> family_solvability(
    const std::vector<FamilySet>& sets, const Ansatz& a,
    std::shared_ptr<const Binding> b, const std::vector<P3d>& pts, double tol) {
    std::vector<SolvabilityRow> out;
    out.reserve(sets.size());
    for (const auto& s : sets) {
        FamilyParams p;
        p.vec = s.lam;
        p.mat = Mat3q{};
        p.mat[0][0] = s.mu11;
        p.mat[2][2] = s.nu33;
        auto t = family_tensor(KillingFamily::linear, p, nullptr, b);
        auto ns = nullspace(assemble(t, a, b, pts), tol);
        out.push_back({s.name, ns.dimension, ns.degenerate});
    }
    return out;
}

KillingTensor AnsatzFile::tensor() const {
    return family_tensor(family, params, nullptr, binding);
}

AnsatzFile parse_ansatz(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(origin + ": " + e.what());
    }
    if (!j.is_object())
        throw std::runtime_error(origin + ": top level must be an object");
    if (j.value("schema", 0) != 1)
        throw std::runtime_error(origin + ": unsupported schema");
    if (!j.contains("tensor_family"))
        throw std::runtime_error(origin + ": missing tensor_family");

    AnsatzFile out;
    out.family = family_from_name(j["tensor_family"].get<std::string>(), origin);

    auto bind = std::make_shared<Binding>();
    if (j.contains("params")) {
        const auto& params = j["params"];
        if (!params.is_object())
            throw std::runtime_error(origin + ": params must be an object");
        for (auto it = params.begin(); it != params.end(); ++it) {
            const std::string& key = it.key();
            if (key == "vec") {
                if (!it->is_array() || it->size() != 3)
                    throw std::runtime_error(origin + ": vec needs 3 entries");
                for (int i = 0; i < 3; ++i)
                    out.params.vec[i] = json_rat((*it)[i], origin + ": vec");
            } else if (key == "mat") {
                if (!it->is_array() || it->size() != 3)
                    throw std::runtime_error(origin + ": mat needs 3 rows");
                for (int i = 0; i < 3; ++i) {
                    if (!(*it)[i].is_array() || (*it)[i].size() != 3)
                        throw std::runtime_error(origin + ": mat rows need 3 entries");
                    for (int k = 0; k < 3; ++k)
                        out.params.mat[i][k] = json_rat((*it)[i][k], origin + ": mat");
                }
            } else if (key == "sigma") {
                out.params.sigma = json_rat(*it, origin + ": sigma");
            } else if (key == "screw") {
                out.params.screw = json_rat(*it, origin + ": screw");
            } else {
                bind->params[key] = json_rat(*it, origin + ": params." + key);
            }
        }
    }
    out.binding = bind;

    if (!j.contains("basis_M") || !j.contains("basis_N"))
        throw std::runtime_error(origin + ": missing basis_M or basis_N");
    out.ansatz.basis_M = parse_basis(j["basis_M"], origin, "basis_M");
    out.ansatz.basis_N = parse_basis(j["basis_N"], origin, "basis_N");

    if (j.contains("homogeneity") && !j["homogeneity"].is_null()) {
        const auto& h = j["homogeneity"];
        if (!h.is_object())
            throw std::runtime_error(origin + ": homogeneity must be an object");
        if (h.contains("M") && !h["M"].is_null())
            out.ansatz.weight_M = json_rat(h["M"], origin + ": homogeneity.M");
        if (h.contains("N") && !h["N"].is_null())
            out.ansatz.weight_N = json_rat(h["N"], origin + ": homogeneity.N");
    }
    return out;
}

AnsatzFile load_ansatz(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ansatz file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_ansatz(ss.str(), path);
}

}  // namespace pdm
