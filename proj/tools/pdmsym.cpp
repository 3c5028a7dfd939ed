#include <iostream>

#include "CLI11.hpp"
#include "pdmsym/catalog.hpp"
#include "pdmsym/sampling.hpp"
#include "pdmsym/solver.hpp"
#include "pdmsym/transform.hpp"

using namespace pdm;

namespace {

struct RunConfig {
    std::uint64_t seed = 1;
    int points = 50;
    int order = 4;
    std::string mode = "float";
    double tolerance = 1e-7;
    std::string catalog = "data/catalog.json";
    std::string out;

    bool rational() const { return mode == "rational"; }
    VerifyConfig verify() const {
        return VerifyConfig{seed, points, order, rational(), tolerance};
    }
};

void add_common(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--seed", rc.seed, "seed of the deterministic sample stream");
    cmd->add_option("--points", rc.points, "sample points per check")
        ->check(CLI::Range(10, 1000000));
    cmd->add_option("--order", rc.order, "jet truncation order")
        ->check(CLI::Range(4, 6));
    cmd->add_option("--mode", rc.mode, "float or rational evaluation")
        ->check(CLI::IsMember({"float", "rational"}));
    cmd->add_option("--tolerance", rc.tolerance, "pass/fail residual bound")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--catalog", rc.catalog, "catalog JSON path");
    cmd->add_option("--out", rc.out, "write the JSON report to this file");
}

void emit(const RunConfig& rc, const Json& report) {
    if (!rc.out.empty()) write_json_file(rc.out, report);
}

// ---------------------------------------------------------------- verify ---

int cmd_verify(const RunConfig& rc, const std::string& entry_id) {
    const Catalog cat = load_catalog(rc.catalog);
    const VerifyConfig cfg = rc.verify();

    CatalogReport rep;
    if (!entry_id.empty()) {
        const CatalogEntry* e = cat.find(entry_id);
        if (!e) {
            std::cerr << "no catalog entry '" << entry_id << "'\n";
            return 2;
        }
        Catalog one;
        one.entries.push_back(*e);
        rep = verify_all(one, cfg);
    } else {
        rep = verify_all(cat, cfg);
    }

    for (const EntryReport& r : rep.entries) {
        const char* tag = r.skipped ? "SKIP" : r.pass ? "PASS" : "FAIL";
        std::cout << tag << " " << r.id;
        if (r.quarantined) std::cout << " [quarantined]";
        if (!r.skipped) {
            std::cout << "  worst " << r.worst << "  (";
            for (size_t k = 0; k < r.checks.size(); ++k) {
                if (k) std::cout << ", ";
                std::cout << r.checks[k].name << " ";
                if (cfg.rational)
                    std::cout << (r.checks[k].exact ? "exact" : "nonzero");
                else
                    std::cout << r.checks[k].residual;
            }
            std::cout << ")";
        }
        if (!r.error.empty()) std::cout << "  error: " << r.error;
        std::cout << "\n";
    }
    std::cout << "passed " << rep.passed << ", failed " << rep.failed << ", skipped "
              << rep.skipped << ", quarantined failures " << rep.quarantined_failed
              << "\n";
    emit(rc, rep.to_json(cfg));
    return rep.ok ? 0 : 1;
}

// --------------------------------------------------------------- killing ---

Mat3q random_traceless(SplitMix64& g) {
    Mat3q m{};
    const Rat a = sample_coordinate(g), b = sample_coordinate(g);
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = -a - b;
    m[0][1] = m[1][0] = sample_coordinate(g);
    m[0][2] = m[2][0] = sample_coordinate(g);
    m[1][2] = m[2][1] = sample_coordinate(g);
    return m;
}

int cmd_killing(const RunConfig& rc, const std::string& tensor_spec) {
    const SampleSet s = sample_points(rc.seed, rc.points);
    Json rows = Json::array();
    bool all_ok = true;

    if (!tensor_spec.empty()) {
        // "mu11 = x1^3, mu23 = ..." with unset components zero
        auto b = std::make_shared<const Binding>();
        std::array<Coeff, 6> packed;
        static const std::map<std::string, int> slot = {{"mu11", 0}, {"mu12", 1},
                                                        {"mu13", 2}, {"mu22", 3},
                                                        {"mu23", 4}, {"mu33", 5}};
        std::stringstream ss(tensor_spec);
        std::string part;
        while (std::getline(ss, part, ',')) {
            const size_t eq = part.find('=');
            if (eq == std::string::npos) {
                std::cerr << "tensor components look like mu11=expr\n";
                return 2;
            }
            std::string key = part.substr(0, eq);
            key.erase(remove_if(key.begin(), key.end(), ::isspace), key.end());
            auto it = slot.find(key);
            if (it == slot.end()) {
                std::cerr << "unknown tensor component '" << key << "'\n";
                return 2;
            }
            packed[it->second] = Coeff::from_field(parse_field(part.substr(eq + 1)), b);
        }
        const KillingTensor t(std::move(packed), nullptr, b);
        const double res = killing_residual(t, s.pts);
        const Rat probe = killing_residual(t, std::vector<P3q>{P3q{Rat(1), Rat(1), Rat(1)}});
        std::cout << "custom tensor: residual " << res << " over " << rc.points
                  << " points, " << rat_str(probe) << " at (1,1,1)\n";
        const bool ok = res <= rc.tolerance;
        rows.push_back({{"name", "custom"},
                        {"residual", res},
                        {"at_unit_point", rat_str(probe)},
                        {"pass", ok}});
        Json rep = {{"schema", 1}, {"command", "killing"}, {"rows", rows}};
        emit(rc, rep);
        return ok ? 0 : 1;
    }

    SplitMix64 g(rc.seed ^ 0x9e3779b97f4a7c15ULL);
    auto bind = std::make_shared<const Binding>();
    const FieldPtr gfield = parse_field("1/2 + x1 - x2^2/3");
    for (int n = 0; n <= 9; ++n) {
        KillingParams p;
        if (n == 2 || n == 4 || n == 7)
            p.set_vector(n, Vec3q{sample_coordinate(g), sample_coordinate(g),
                                  sample_coordinate(g)});
        if (n == 1 || n == 3 || n == 6 || n == 8 || n == 9)
            p.set_matrix(n, random_traceless(g));
        if (n == 5) p.set_scalar(sample_coordinate(g));
        const KillingTensor t = basis_tensor(n, p, n == 0 ? gfield : nullptr, bind);
        bool ok = true;
        Json row = {{"name", "K" + std::to_string(n)}};
        if (rc.rational()) {
            const Rat res = killing_residual(t, s.qpts);
            ok = res == 0;
            row["residual"] = rat_str(res);
            std::cout << "K" << n << ": residual " << rat_str(res) << "\n";
        } else {
            const double res = killing_residual(t, s.pts);
            ok = res <= rc.tolerance;
            row["residual"] = res;
            std::cout << "K" << n << ": residual " << res << "\n";
        }
        row["pass"] = ok;
        rows.push_back(std::move(row));
        all_ok = all_ok && ok;
    }
    Json rep = {{"schema", 1}, {"command", "killing"}, {"rows", rows}};
    emit(rc, rep);
    return all_ok ? 0 : 1;
}

// ----------------------------------------------------------------- solve ---

int cmd_solve(const RunConfig& rc, const std::string& ansatz_path) {
    AnsatzFile af = load_ansatz(ansatz_path);
    const SampleSet s = sample_points(rc.seed, rc.points);

    LinearSystem L;
    try {
        L = assemble(af.tensor(), af.ansatz, af.binding, s.pts);
    } catch (const std::invalid_argument& ex) {
        std::cerr << ex.what() << "\n";
        return 2;
    }
    const NullspaceResult nr = nullspace(L);

    std::cout << "dimension " << nr.dimension;
    if (nr.degenerate) std::cout << " (degenerate: the system vanishes identically)";
    std::cout << "\nspectrum";
    for (double sv : nr.singular_values) std::cout << " " << sv;
    std::cout << "\n";
    for (size_t k = 0; k < nr.basis.size(); ++k) {
        std::cout << "basis " << k + 1 << ":";
        for (double c : nr.basis[k]) std::cout << " " << c;
        std::cout << "\n";
    }

    Json rep = {{"schema", 1},
                {"command", "solve"},
                {"dimension", nr.dimension},
                {"degenerate", nr.degenerate},
                {"spectrum", nr.singular_values},
                {"basis", nr.basis}};
    if (rc.rational()) {
        try {
            const int rn = rational_nullity(af.tensor(), af.ansatz, af.binding, s.qpts);
            std::cout << "rational nullity " << rn << "\n";
            rep["rational_nullity"] = rn;
        } catch (const EvalError& ex) {
            std::cerr << "rational route unavailable: " << ex.what() << "\n";
            return 1;
        }
    }
    emit(rc, rep);
    return 0;
}

// ------------------------------------------------------------- transform ---

int parse_axis(const std::string& s) {
    if (s == "x" || s == "1") return 1;
    if (s == "y" || s == "2") return 2;
    if (s == "z" || s == "3") return 3;
    return 0;
}

std::optional<PointTransform> parse_map(const std::string& spec) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.empty()) return std::nullopt;
    try {
        if (parts[0] == "inversion" && parts.size() == 1)
            return PointTransform::inversion();
        if (parts[0] == "rotation" && parts.size() == 3) {
            const int axis = parse_axis(parts[1]);
            if (!axis) return std::nullopt;
            std::string deg = parts[2];
            if (deg.size() > 3 && deg.substr(deg.size() - 3) == "deg")
                deg = deg.substr(0, deg.size() - 3);
            return PointTransform::rotation(axis, parse_rat(deg));
        }
        if (parts[0] == "shift" && parts.size() == 2) {
            std::array<Rat, 3> v{};
            std::stringstream cs(parts[1]);
            std::string c;
            for (int k = 0; k < 3; ++k) {
                if (!std::getline(cs, c, ',')) return std::nullopt;
                v[k] = parse_rat(c);
            }
            return PointTransform::shift(v);
        }
        if (parts[0] == "dilatation" && parts.size() == 2)
            return PointTransform::dilatation(parse_rat(parts[1]));
    } catch (const std::exception&) {
        return std::nullopt;
    }
    return std::nullopt;
}

int cmd_transform(const RunConfig& rc, const std::string& entry_id,
                  const std::string& op_name, const std::string& map_spec) {
    const auto t = parse_map(map_spec);
    if (!t) {
        std::cerr << "bad --map; use rotation:z:90, shift:a,b,c, dilatation:s, "
                     "or inversion\n";
        return 2;
    }
    const Catalog cat = load_catalog(rc.catalog);
    const CatalogEntry* e = cat.find(entry_id);
    if (!e) {
        std::cerr << "no catalog entry '" << entry_id << "'\n";
        return 2;
    }
    const EntryOperators ops = build_entry(*e);
    int qidx = 0;
    if (op_name.size() > 1 && (op_name[0] == 'Q' || op_name[0] == 'q'))
        qidx = std::atoi(op_name.c_str() + 1);
    else if (!op_name.empty())
        qidx = std::atoi(op_name.c_str());
    if (qidx < 1 || qidx > static_cast<int>(ops.qs.size())) {
        std::cerr << "entry has integrals Q1..Q" << ops.qs.size() << "\n";
        return 2;
    }

    const DiffOperator moved = pullback(ops.qs[qidx - 1], *t);
    const DiffOperator comm = commutator(ops.h, moved);

    std::vector<Coeff> probes;
    for (const DiffOperator* a : {&ops.h, &moved, &comm})
        for (const Coeff& c : a->comps())
            if (!c.is_zero()) probes.push_back(c);
    const SampleSet s = sample_points(rc.seed, rc.points, probes, rc.order);

    const double res = residual_norm(comm, s.pts, ops.h, moved);
    std::cout << "commutator residual of the transported Q" << qidx << ": " << res
              << " (" << s.rejected << " points rejected)\n";
    Json rep = {{"schema", 1},       {"command", "transform"},
                {"entry", entry_id}, {"op", "Q" + std::to_string(qidx)},
                {"map", map_spec},   {"residual", res},
                {"rejected", s.rejected}};
    emit(rc, rep);
    return res <= rc.tolerance ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"symbolic-numeric engine for position-dependent-mass operators"};
    app.require_subcommand(1);
    RunConfig rc;

    std::string entry_id, tensor_spec, ansatz_path, op_name = "Q1", map_spec;

    CLI::App* verify = app.add_subcommand("verify", "check catalog integrals");
    add_common(verify, rc);
    verify->add_option("--entry", entry_id, "verify a single entry id");

    CLI::App* killing = app.add_subcommand("killing", "conformal Killing residuals");
    add_common(killing, rc);
    killing->add_option("--tensor", tensor_spec, "custom components mu11=...,mu12=...");

    CLI::App* solve = app.add_subcommand("solve", "linear determining-system ansatz");
    add_common(solve, rc);
    solve->add_option("--ansatz", ansatz_path, "ansatz JSON path")->required();

    CLI::App* transform = app.add_subcommand("transform", "transport an integral");
    add_common(transform, rc);
    transform->add_option("--entry", entry_id, "catalog entry id")->required();
    transform->add_option("--op", op_name, "integral name (default Q1)");
    transform->add_option("--map", map_spec, "rotation:z:90 | shift:a,b,c | "
                                             "dilatation:s | inversion")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(rc, entry_id);
        if (killing->parsed()) return cmd_killing(rc, tensor_spec);
        if (solve->parsed()) return cmd_solve(rc, ansatz_path);
        if (transform->parsed()) return cmd_transform(rc, entry_id, op_name, map_spec);
    } catch (const IoError& ex) {
        std::cerr << ex.what() << "\n";
        return 3;
    } catch (const CatalogError& ex) {
        std::cerr << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    }
    return 2;
}
