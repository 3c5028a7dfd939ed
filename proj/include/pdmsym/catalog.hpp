#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pdmsym/determ.hpp"
#include "pdmsym/op.hpp"
#include "pdmsym/report.hpp"

namespace pdm {

struct CatalogError : std::runtime_error {
    explicit CatalogError(const std::string& what) : std::runtime_error(what) {}
};

const char* symmetry_name(SymmetryTag t);
SymmetryTag symmetry_from_name(const std::string& s);

// Optional cross-check metadata: ties integral number q (1-based) to the
// linear-form data (N, Nt) of its mass pair, so the first-order determining
// residuals can be evaluated against the same entry.
struct MassPairCheck {
    int q = 0;
    std::string n_expr;
    std::string nt_expr;
};

// One mass/potential profile with its commuting second-order operators.
// f and V are field expressions; params are shared rational constants and
// slots are named default profiles (arity-0, referenced by bare name).
struct CatalogEntry {
    std::string id;
    std::string source;
    SymmetryTag symmetry = SymmetryTag::none;
    std::string status;  // integrable | superintegrable | maximally-superintegrable
    std::string f_expr;
    std::string v_expr;
    std::map<std::string, Rat> params;
    std::map<std::string, std::string> slots;
    std::vector<std::string> integrals;
    std::vector<std::string> relations;  // operator expressions expected zero
    std::vector<MassPairCheck> checks;
    bool quarantined = false;
    bool float_only = false;
    std::string note;

    std::shared_ptr<const Binding> make_binding() const;
};

struct Catalog {
    std::vector<CatalogEntry> entries;
    const CatalogEntry* find(const std::string& id) const;
};

// Schema 1. Rows carrying {"series": {"kind", "m", ...}} are expanded through
// series_entry at load time. Raises CatalogError on schema violations, on
// expression parse failures, and on names that resolve to neither a
// parameter, a slot, a coordinate, nor a generator (reported with the entry
// id).
Catalog parse_catalog(const Json& doc, const std::string& origin);
Catalog load_catalog(const std::string& path);

enum class SeriesKind { Phi, Omega };

// Closed-form member m (1..6) of one of the two polynomial mass series. The
// Phi family lives on the axially reduced cone and needs mu != nu; the Omega
// family is planar and ignores both parameters.
CatalogEntry series_entry(SeriesKind kind, int m, const Rat& mu = Rat(2),
                          const Rat& nu = Rat(1));

// e with `term` added to the mass profile f (negative-control helper).
CatalogEntry perturb_mass(const CatalogEntry& e, const std::string& term);

// Symmetric tensor read off the second-order symbol of q (diagonal -c_alpha,
// off-diagonal -c_alpha/2); no conformal part.
KillingTensor symbol_tensor(const DiffOperator& q,
                            std::shared_ptr<const Binding> b);

// The entry fully parsed and validated: binding, profiles, Hamiltonian, and
// every integral (named Q1..Qk for the relation expressions). Raises
// CatalogError with the entry id on any structural problem.
struct EntryOperators {
    std::shared_ptr<const Binding> binding;
    FieldPtr f, v;
    DiffOperator h;
    std::vector<DiffOperator> qs;
    std::vector<DiffOperator> rels;
};
EntryOperators build_entry(const CatalogEntry& e);

struct VerifyConfig {
    std::uint64_t seed = 1;
    int points = 50;
    int order = 4;
    bool rational = false;
    double tolerance = 1e-7;
};

struct OperatorCheck {
    std::string name;       // Q1.. for integrals, R1.. for relations
    double residual = 0.0;  // scaled commutator / relation norm (float mode)
    bool exact = false;     // rational mode: every coefficient vanished
};

struct EntryReport {
    std::string id;
    bool quarantined = false;
    bool skipped = false;  // rational run on an entry outside rational scope
    bool pass = false;
    double worst = 0.0;
    std::vector<OperatorCheck> checks;
    std::string error;
    Json to_json() const;
};

struct CatalogReport {
    std::vector<EntryReport> entries;  // ordered by id
    int passed = 0;
    int failed = 0;
    int skipped = 0;
    int quarantined_failed = 0;
    bool ok = false;  // no non-quarantined entry failed
    Json to_json(const VerifyConfig& cfg) const;
};

EntryReport verify_entry(const CatalogEntry& e, const VerifyConfig& cfg);
CatalogReport verify_all(const Catalog& c, const VerifyConfig& cfg);

}  // namespace pdm
