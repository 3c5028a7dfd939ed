#include "pdmsym/catalog.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "pdmsym/sampling.hpp"

namespace pdm {

namespace {

const std::vector<std::string> kStatuses = {
    "integrable", "superintegrable", "maximally-superintegrable"};

std::string quote_name(const std::string& s) { return "'" + s + "'"; }

[[noreturn]] void entry_fail(const std::string& id, const std::string& what) {
    throw CatalogError("entry " + quote_name(id) + ": " + what);
}

bool valid_id(const std::string& id) {
    if (id.empty()) return false;
    for (char c : id)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '-'))
            return false;
    return true;
}

Rat rat_value(const Json& v, const std::string& ctx) {
    try {
        if (v.is_number_integer()) return Rat(static_cast<long>(v.get<long long>()));
        if (v.is_string()) return parse_rat(v.get<std::string>());
    } catch (const std::exception& ex) {
        throw CatalogError(ctx + ": " + ex.what());
    }
    throw CatalogError(ctx + ": expected a rational (integer or \"p/q\" string)");
}

}  // namespace

const char* symmetry_name(SymmetryTag t) {
    switch (t) {
        case SymmetryTag::dilatation: return "dilatation";
        case SymmetryTag::shift: return "shift";
        default: return "none";
    }
}

SymmetryTag symmetry_from_name(const std::string& s) {
    if (s == "none") return SymmetryTag::none;
    if (s == "dilatation") return SymmetryTag::dilatation;
    if (s == "shift") return SymmetryTag::shift;
    throw CatalogError("unknown symmetry tag " + quote_name(s));
}

std::shared_ptr<const Binding> CatalogEntry::make_binding() const {
    auto b = std::make_shared<Binding>();
    b->params = params;
    for (const auto& [name, body] : slots) {
        Slot s;
        try {
            s.body = parse_field(body);
        } catch (const ParseError& pe) {
            entry_fail(id, "slot " + quote_name(name) + ": " + pe.what());
        }
        b->slots[name] = std::move(s);
    }
    return b;
}

const CatalogEntry* Catalog::find(const std::string& id) const {
    for (const CatalogEntry& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

namespace {

// Parses expr in the context of e and checks every free name is bound.
FieldPtr checked_field(const CatalogEntry& e, const Binding& b,
                       const std::string& expr, const std::string& where) {
    FieldPtr p;
    try {
        p = parse_field(expr);
    } catch (const ParseError& pe) {
        entry_fail(e.id, where + ": " + pe.what());
    }
    auto [ps, ss] = free_names(p, b);
    if (!ps.empty()) entry_fail(e.id, where + ": dangling parameter " + quote_name(*ps.begin()));
    if (!ss.empty()) entry_fail(e.id, where + ": dangling slot " + quote_name(*ss.begin()));
    return p;
}

}  // namespace

EntryOperators build_entry(const CatalogEntry& e) {
    EntryOperators out;
    out.binding = e.make_binding();
    for (const auto& [name, slot] : out.binding->slots) {
        auto [ps, ss] = free_names(slot.body, *out.binding);
        if (!ps.empty())
            entry_fail(e.id, "slot " + quote_name(name) + ": dangling parameter " +
                                 quote_name(*ps.begin()));
        if (!ss.empty())
            entry_fail(e.id, "slot " + quote_name(name) + ": dangling slot " +
                                 quote_name(*ss.begin()));
    }
    out.f = checked_field(e, *out.binding, e.f_expr, "f");
    out.v = checked_field(e, *out.binding, e.v_expr, "V");
    out.h = hamiltonian(out.f, out.v, out.binding);

    OpEnv env;
    env.binding = out.binding;
    env.hamiltonian = out.h;
    for (size_t k = 0; k < e.integrals.size(); ++k) {
        DiffOperator q;
        try {
            q = parse_operator(e.integrals[k], env);
        } catch (const std::exception& ex) {
            entry_fail(e.id, "integral " + std::to_string(k + 1) + ": " + ex.what());
        }
        env.named["Q" + std::to_string(k + 1)] = q;
        out.qs.push_back(std::move(q));
    }
    for (size_t k = 0; k < e.relations.size(); ++k) {
        try {
            out.rels.push_back(parse_operator(e.relations[k], env));
        } catch (const std::exception& ex) {
            entry_fail(e.id, "relation " + std::to_string(k + 1) + ": " + ex.what());
        }
    }
    for (const MassPairCheck& c : e.checks) {
        if (c.q < 1 || c.q > static_cast<int>(e.integrals.size()))
            entry_fail(e.id, "check references integral " + std::to_string(c.q));
        checked_field(e, *out.binding, c.n_expr, "check N");
        checked_field(e, *out.binding, c.nt_expr, "check Nt");
    }
    return out;
}

namespace {

CatalogEntry entry_from_json(const Json& row, const std::string& origin) {
    static const std::set<std::string> known = {
        "id",        "source",    "symmetry",  "status", "f",
        "V",         "params",    "slots",     "integrals", "relations",
        "checks",    "quarantined", "float_only", "note"};
    static const std::set<std::string> series_known = {
        "id", "series", "source", "note", "quarantined"};

    if (!row.is_object()) throw CatalogError(origin + ": entry rows must be objects");

    const bool is_series = row.contains("series");
    for (auto it = row.begin(); it != row.end(); ++it) {
        const std::set<std::string>& allowed = is_series ? series_known : known;
        if (!allowed.count(it.key()))
            throw CatalogError(origin + ": unknown key " + quote_name(it.key()) +
                               (is_series ? " in series row" : ""));
    }

    if (is_series) {
        const Json& s = row["series"];
        if (!s.is_object() || !s.contains("kind") || !s.contains("m"))
            throw CatalogError(origin + ": series rows need kind and m");
        for (auto it = s.begin(); it != s.end(); ++it)
            if (it.key() != "kind" && it.key() != "m" && it.key() != "mu" &&
                it.key() != "nu")
                throw CatalogError(origin + ": unknown series key " + quote_name(it.key()));
        const std::string kind = s["kind"].get<std::string>();
        SeriesKind sk;
        if (kind == "phi") sk = SeriesKind::Phi;
        else if (kind == "omega") sk = SeriesKind::Omega;
        else throw CatalogError(origin + ": unknown series kind " + quote_name(kind));
        if (!s["m"].is_number_integer())
            throw CatalogError(origin + ": series m must be an integer");
        const int m = s["m"].get<int>();
        const Rat mu = s.contains("mu") ? rat_value(s["mu"], origin + ": mu") : Rat(2);
        const Rat nu = s.contains("nu") ? rat_value(s["nu"], origin + ": nu") : Rat(1);
        CatalogEntry e = series_entry(sk, m, mu, nu);
        if (row.contains("id")) e.id = row["id"].get<std::string>();
        if (row.contains("source")) e.source = row["source"].get<std::string>();
        if (row.contains("note")) e.note = row["note"].get<std::string>();
        if (row.contains("quarantined")) e.quarantined = row["quarantined"].get<bool>();
        return e;
    }

    CatalogEntry e;
    auto need_string = [&](const char* key) -> std::string {
        if (!row.contains(key) || !row[key].is_string())
            throw CatalogError(origin + ": missing string field " + quote_name(key));
        return row[key].get<std::string>();
    };
    e.id = need_string("id");
    const std::string ctx = origin + ": entry " + quote_name(e.id);
    e.f_expr = need_string("f");
    e.v_expr = need_string("V");
    if (row.contains("source")) e.source = row["source"].get<std::string>();
    if (row.contains("note")) e.note = row["note"].get<std::string>();
    if (row.contains("symmetry")) e.symmetry = symmetry_from_name(row["symmetry"].get<std::string>());
    e.status = row.contains("status") ? row["status"].get<std::string>() : "integrable";
    if (std::find(kStatuses.begin(), kStatuses.end(), e.status) == kStatuses.end())
        throw CatalogError(ctx + ": unknown status " + quote_name(e.status));
    if (row.contains("quarantined")) e.quarantined = row["quarantined"].get<bool>();
    if (row.contains("float_only")) e.float_only = row["float_only"].get<bool>();
    if (row.contains("params")) {
        if (!row["params"].is_object()) throw CatalogError(ctx + ": params must be an object");
        for (auto it = row["params"].begin(); it != row["params"].end(); ++it)
            e.params[it.key()] = rat_value(it.value(), ctx + ": param " + quote_name(it.key()));
    }
    if (row.contains("slots")) {
        if (!row["slots"].is_object()) throw CatalogError(ctx + ": slots must be an object");
        for (auto it = row["slots"].begin(); it != row["slots"].end(); ++it) {
            if (!it.value().is_string())
                throw CatalogError(ctx + ": slot " + quote_name(it.key()) + " must be a string");
            e.slots[it.key()] = it.value().get<std::string>();
        }
    }
    auto string_list = [&](const char* key) {
        std::vector<std::string> out;
        if (!row.contains(key)) return out;
        if (!row[key].is_array()) throw CatalogError(ctx + ": " + key + " must be an array");
        for (const Json& v : row[key]) {
            if (!v.is_string()) throw CatalogError(ctx + ": " + key + " holds non-strings");
            out.push_back(v.get<std::string>());
        }
        return out;
    };
    e.integrals = string_list("integrals");
    e.relations = string_list("relations");
    if (row.contains("checks")) {
        if (!row["checks"].is_array()) throw CatalogError(ctx + ": checks must be an array");
        for (const Json& c : row["checks"]) {
            if (!c.is_object() || !c.contains("q") || !c.contains("N") || !c.contains("Nt"))
                throw CatalogError(ctx + ": checks need q, N, Nt");
            MassPairCheck mc;
            mc.q = c["q"].get<int>();
            mc.n_expr = c["N"].get<std::string>();
            mc.nt_expr = c["Nt"].get<std::string>();
            e.checks.push_back(std::move(mc));
        }
    }
    if (e.integrals.empty()) throw CatalogError(ctx + ": no integrals");
    return e;
}

}  // namespace

Catalog parse_catalog(const Json& doc, const std::string& origin) {
    if (!doc.is_object() || !doc.contains("schema") || doc["schema"] != 1)
        throw CatalogError(origin + ": schema must be 1");
    if (!doc.contains("entries") || !doc["entries"].is_array())
        throw CatalogError(origin + ": missing entries array");
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (it.key() != "schema" && it.key() != "entries")
            throw CatalogError(origin + ": unknown key " + quote_name(it.key()));

    Catalog c;
    std::set<std::string> seen;
    for (const Json& row : doc["entries"]) {
        CatalogEntry e = entry_from_json(row, origin);
        if (!valid_id(e.id))
            throw CatalogError(origin + ": bad id " + quote_name(e.id) +
                               " (lowercase letters, digits, dashes)");
        if (!seen.insert(e.id).second)
            throw CatalogError(origin + ": duplicate id " + quote_name(e.id));
        build_entry(e);  // structural validation, result discarded
        c.entries.push_back(std::move(e));
    }
    return c;
}

Catalog load_catalog(const std::string& path) {
    return parse_catalog(read_json_file(path), path);
}

CatalogEntry perturb_mass(const CatalogEntry& e, const std::string& term) {
    CatalogEntry out = e;
    out.f_expr = "(" + e.f_expr + ") + (" + term + ")";
    out.note = "perturbed copy of " + e.id;
    return out;
}

KillingTensor symbol_tensor(const DiffOperator& q,
                            std::shared_ptr<const Binding> b) {
    const CRat half{rat(-1, 2), Rat(0)};
    std::array<Coeff, 6> packed;
    packed[0] = cf_neg(q.coeff(MIdx{2, 0, 0}));
    packed[1] = cf_scale(q.coeff(MIdx{1, 1, 0}), half);
    packed[2] = cf_scale(q.coeff(MIdx{1, 0, 1}), half);
    packed[3] = cf_neg(q.coeff(MIdx{0, 2, 0}));
    packed[4] = cf_scale(q.coeff(MIdx{0, 1, 1}), half);
    packed[5] = cf_neg(q.coeff(MIdx{0, 0, 2}));
    return KillingTensor(std::move(packed), nullptr, std::move(b));
}

// ---------------------------------------------------------------------------
// Series families

namespace {

FieldPtr fi(long k) { return f_num(Rat(static_cast<long>(k))); }
FieldPtr fv(const std::string& n) { return f_name(n); }

// ((w + u)^m + (-1)^{m+1} (w - u)^m) / w as a polynomial in u and w2 = w^2;
// the closed forms below cover m = 0..7.
FieldPtr ladder_poly(int m, const FieldPtr& u, const FieldPtr& w2) {
    auto P = [&](int k) { return f_pow(u, k); };
    auto W = [&](int k) { return f_pow(w2, k); };
    switch (m) {
        case 0: return fi(0);
        case 1: return fi(2);
        case 2: return f_mul(fi(4), u);
        case 3: return f_add(f_mul(fi(2), w2), f_mul(fi(6), P(2)));
        case 4: return f_mul(f_mul(fi(8), u), f_add(w2, P(2)));
        case 5:
            return f_mul(fi(2), f_add(f_add(W(2), f_mul(fi(10), f_mul(w2, P(2)))),
                                      f_mul(fi(5), P(4))));
        case 6:
            return f_mul(f_mul(fi(4), u),
                         f_add(f_add(f_mul(fi(3), W(2)), f_mul(fi(10), f_mul(w2, P(2)))),
                               f_mul(fi(3), P(4))));
        case 7:
            return f_mul(fi(2), f_add(f_add(W(3), f_mul(fi(21), f_mul(W(2), P(2)))),
                                      f_add(f_mul(fi(35), f_mul(w2, P(4))),
                                            f_mul(fi(7), P(6)))));
        default:
            throw CatalogError("series member out of range");
    }
}

}  // namespace

CatalogEntry series_entry(SeriesKind kind, int m, const Rat& mu, const Rat& nu) {
    if (m < 1 || m > 6) throw CatalogError("series m must lie in 1..6");

    CatalogEntry e;
    const FieldPtr x1 = fv("x1"), x2 = fv("x2"), x3 = fv("x3");
    const FieldPtr x1sq = f_pow(x1, 2), x2sq = f_pow(x2, 2), x3sq = f_pow(x3, 2);

    if (kind == SeriesKind::Phi) {
        if (mu == nu) throw CatalogError("phi series needs mu != nu");
        const Rat s = mu * nu * (mu - nu);
        if (s == 0) throw CatalogError("phi series needs mu, nu, mu - nu nonzero");

        // rho = (mu x1^2 - nu x2^2)/x3^2 + mu nu (mu - nu)
        const FieldPtr rho = f_add(
            f_div(f_sub(f_mul(f_num(mu), x1sq), f_mul(f_num(nu), x2sq)), x3sq),
            f_num(s));
        // z = (nu x1^2 + mu x2^2 + (mu - nu)(mu^2 - nu^2) x3^2) / (x3^2 sqrt|s|)
        const Rat zc = (mu - nu) * (mu * mu - nu * nu);
        const FieldPtr zn = f_add(f_add(f_mul(f_num(nu), x1sq), f_mul(f_num(mu), x2sq)),
                                  f_mul(f_num(zc), x3sq));
        const FieldPtr root = f_call("sqrt", {f_num(abs(s))});
        const FieldPtr z = f_div(zn, f_mul(x3sq, root));
        const FieldPtr w2 = f_add(f_pow(z, 2), f_mul(fi(4), rho));

        const FieldPtr phim = ladder_poly(m, z, w2);
        const FieldPtr phim1 = ladder_poly(m - 1, z, w2);
        const FieldPtr phip = ladder_poly(m + 1, z, w2);

        e.id = "table1-item5-m" + std::to_string(m);
        e.source = "axially reduced ladder family, member " + std::to_string(m);
        e.symmetry = SymmetryTag::dilatation;
        e.status = "integrable";
        e.float_only = true;  // the constant sqrt makes it irrational
        e.params["ct"] = rat(1, 4);
        e.f_expr = print_field(f_div(x3sq, phim));
        e.v_expr = print_field(f_mul(fv("ct"), f_div(phip, phim)));

        const FieldPtr n = f_neg(f_mul(rho, phim1));
        const FieldPtr nt = f_neg(f_mul(fv("ct"), f_mul(rho, phim)));
        const FieldPtr etahat =
            f_add(f_mul(fi(3), f_add(f_add(x1sq, x2sq), x3sq)), f_mul(fi(15), x3sq));
        std::ostringstream q;
        q << rat_str(mu) << " * anti{P1, K1} + " << rat_str(nu)
          << " * anti{P2, K2} + dot(" << print_field(n) << ", H) + field("
          << print_field(f_sub(f_neg(nt), etahat)) << ")";
        e.integrals = {q.str()};
        e.checks = {{1, print_field(n), print_field(nt)}};
        return e;
    }

    // Omega family: polynomial planar ladder, rational throughout.
    // y = x1^2 - x2^2 - 1, w2 = (x1^2 + x2^2)^2 - 4 y.
    const FieldPtr y = f_sub(f_sub(x1sq, x2sq), fi(1));
    const FieldPtr B = f_add(x1sq, x2sq);
    const FieldPtr w2 = f_sub(f_pow(B, 2), f_mul(fi(4), y));

    const FieldPtr pm = ladder_poly(m, B, w2);
    const FieldPtr pm1 = ladder_poly(m - 1, B, w2);
    const FieldPtr pp = ladder_poly(m + 1, B, w2);

    e.id = "table2-item8-m" + std::to_string(m);
    e.source = "planar ladder family, member " + std::to_string(m);
    e.symmetry = SymmetryTag::shift;
    e.status = "integrable";
    e.params["ct"] = rat(1, 4);
    e.f_expr = print_field(f_div(fi(1), pm));
    e.v_expr = print_field(f_mul(fv("ct"), f_div(pp, pm)));

    const FieldPtr n = f_neg(f_mul(f_mul(fi(2), y), pm1));
    const FieldPtr nt = f_neg(f_mul(fv("ct"), f_mul(f_mul(fi(2), y), pm)));
    // Shifted representative: the delta part of the plane tensor moves into
    // the multiplier, so the dot argument is N - M and the scalar Mt - Nt.
    const FieldPtr narg = f_sub(n, pm);
    const FieldPtr zeroth = f_sub(f_mul(fv("ct"), pp), nt);
    e.integrals = {"L3^2 + P3^2 + dot(" + print_field(narg) + ", H) + field(" +
                   print_field(zeroth) + ")"};
    e.checks = {{1, print_field(n), print_field(nt)}};
    return e;
}

// ---------------------------------------------------------------------------
// Verification

Json EntryReport::to_json() const {
    Json j;
    j["id"] = id;
    j["quarantined"] = quarantined;
    j["skipped"] = skipped;
    j["pass"] = pass;
    j["worst"] = worst;
    Json cs = Json::array();
    for (const OperatorCheck& c : checks)
        cs.push_back({{"name", c.name}, {"residual", c.residual}, {"exact", c.exact}});
    j["checks"] = std::move(cs);
    if (!error.empty()) j["error"] = error;
    return j;
}

Json CatalogReport::to_json(const VerifyConfig& cfg) const {
    Json j;
    j["schema"] = 1;
    j["config"] = {{"seed", cfg.seed},
                   {"points", cfg.points},
                   {"order", cfg.order},
                   {"mode", cfg.rational ? "rational" : "float"},
                   {"tolerance", cfg.tolerance}};
    j["summary"] = {{"passed", passed},
                    {"failed", failed},
                    {"skipped", skipped},
                    {"quarantined_failed", quarantined_failed},
                    {"ok", ok}};
    Json rows = Json::array();
    for (const EntryReport& r : entries) rows.push_back(r.to_json());
    j["entries"] = std::move(rows);
    return j;
}

EntryReport verify_entry(const CatalogEntry& e, const VerifyConfig& cfg) {
    EntryReport rep;
    rep.id = e.id;
    rep.quarantined = e.quarantined;

    if (cfg.rational && e.float_only) {
        rep.skipped = true;
        rep.pass = true;
        return rep;
    }

    try {
        EntryOperators p = build_entry(e);

        std::vector<DiffOperator> comms;
        comms.reserve(p.qs.size());
        for (const DiffOperator& q : p.qs) comms.push_back(commutator(p.h, q));

        std::vector<Coeff> probes;
        auto add_probes = [&](const DiffOperator& a) {
            for (const Coeff& c : a.comps())
                if (!c.is_zero()) probes.push_back(c);
        };
        add_probes(p.h);
        for (const DiffOperator& q : p.qs) add_probes(q);
        for (const DiffOperator& rl : p.rels) add_probes(rl);
        for (const DiffOperator& cm : comms) add_probes(cm);

        const SampleSet s = sample_points(cfg.seed, cfg.points, probes, cfg.order);

        if (cfg.rational) {
            bool capable = p.h.rational_capable();
            for (const DiffOperator& q : p.qs) capable = capable && q.rational_capable();
            for (const DiffOperator& rl : p.rels) capable = capable && rl.rational_capable();
            if (!capable) {
                rep.error = "entry evaluates through irrational nodes but is not "
                            "marked float_only";
                return rep;
            }
            bool all = true;
            for (size_t k = 0; k < comms.size(); ++k) {
                const bool z = op_exact_zero(comms[k], s.qpts);
                rep.checks.push_back({"Q" + std::to_string(k + 1), z ? 0.0 : 1.0, z});
                all = all && z;
            }
            for (size_t k = 0; k < p.rels.size(); ++k) {
                const bool z = op_exact_zero(p.rels[k], s.qpts);
                rep.checks.push_back({"R" + std::to_string(k + 1), z ? 0.0 : 1.0, z});
                all = all && z;
            }
            rep.pass = all;
            rep.worst = all ? 0.0 : 1.0;
            return rep;
        }

        double worst = 0.0;
        for (size_t k = 0; k < comms.size(); ++k) {
            const double r = residual_norm(comms[k], s.pts, p.h, p.qs[k]);
            rep.checks.push_back({"Q" + std::to_string(k + 1), r, false});
            worst = std::max(worst, r);
        }
        if (!p.rels.empty()) {
            double qscale = 0.0;
            for (const DiffOperator& q : p.qs)
                qscale = std::max(qscale, op_norm(q, s.pts));
            for (size_t k = 0; k < p.rels.size(); ++k) {
                const double r = op_norm(p.rels[k], s.pts) / (1.0 + qscale);
                rep.checks.push_back({"R" + std::to_string(k + 1), r, false});
                worst = std::max(worst, r);
            }
        }
        rep.worst = worst;
        rep.pass = worst <= cfg.tolerance;
    } catch (const std::exception& ex) {
        rep.error = ex.what();
        rep.pass = false;
    }
    return rep;
}

CatalogReport verify_all(const Catalog& c, const VerifyConfig& cfg) {
    CatalogReport rep;
    for (const CatalogEntry& e : c.entries) {
        EntryReport r = verify_entry(e, cfg);
        if (r.skipped) {
            ++rep.skipped;
        } else if (r.pass) {
            ++rep.passed;
        } else if (e.quarantined) {
            ++rep.quarantined_failed;
        } else {
            ++rep.failed;
        }
        rep.entries.push_back(std::move(r));
    }
    std::sort(rep.entries.begin(), rep.entries.end(),
              [](const EntryReport& a, const EntryReport& b) { return a.id < b.id; });
    rep.ok = rep.failed == 0;
    return rep;
}

}  // namespace pdm
