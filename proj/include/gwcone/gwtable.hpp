#pragma once

#include "gwcone/ring.hpp"
#include "gwcone/report.hpp"

#include <algorithm>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gwcone {

struct GwError : std::runtime_error {
    explicit GwError(const std::string& what) : std::runtime_error(what) {}
};
struct Underdetermined : GwError {
    explicit Underdetermined(const std::string& what) : GwError(what) {}
};
struct Inconsistent : GwError {
    explicit Inconsistent(const std::string& what) : GwError(what) {}
};

/// One psi-decorated insertion.
struct Insertion {
    int cls = 0;  // basis index
    int psi = 0;  // psi power
    bool operator<(const Insertion& o) const {
        return cls != o.cls ? cls < o.cls : psi < o.psi;
    }
    bool operator==(const Insertion& o) const { return cls == o.cls && psi == o.psi; }
};

/// Correlator key: genus, curve-class exponent numerators (over the ring's
/// Novikov denominator), and the sorted insertion multiset.
struct CorrKey {
    int genus = 0;
    std::vector<int> degree;       // numerators, length = #Novikov variables
    std::vector<Insertion> ins;    // kept sorted

    int n() const { return (int)ins.size(); }
    long deg_total() const {
        long s = 0;
        for (int d : degree) s += d;
        return s;
    }
    bool deg_zero() const { return deg_total() == 0; }
    int psi_total() const {
        int s = 0;
        for (const auto& i : ins) s += i.psi;
        return s;
    }
    void canonicalize() { std::sort(ins.begin(), ins.end()); }
    bool operator<(const CorrKey& o) const {
        if (genus != o.genus) return genus < o.genus;
        if (degree != o.degree) return degree < o.degree;
        return ins < o.ins;
    }
    bool operator==(const CorrKey& o) const {
        return genus == o.genus && degree == o.degree && ins == o.ins;
    }
};

std::string key_str(const CorrKey& k, const Ring& ring);

/// Declared support bounds of a table. deg_cap is in numerator units (total
/// over all Novikov variables); poly_var[i] declares the table complete
/// (polynomial) in Novikov variable i.
struct GwBounds {
    int max_n = 0;
    int max_psi = 0;
    int max_genus = 0;
    long deg_cap = 0;
    std::vector<bool> poly_var;

    static GwBounds infer();  // placeholder defaults; ingest widens from data
};

struct Provenance {
    std::string rule;   // "seed", "string", "dilaton", "divisor", "trr", ...
    std::string note;
};

class CorrelatorTable {
  public:
    RingPtr ring;
    std::map<CorrKey, FieldElem> data;
    std::map<CorrKey, Provenance> prov;
    GwBounds bounds;
    std::vector<std::vector<int>> extra_ne;  // declared effective classes

    // lazy caches, invalidated by insert()
    mutable std::shared_ptr<void> ne_cache;
    mutable std::shared_ptr<std::vector<int>> poly_cache;

    /// Max degree numerator seen per Novikov variable (cache for polynomial
    /// variables; queries beyond it in a polynomial variable return zero).
    std::vector<int> poly_max() const;

    bool stored(const CorrKey& k) const { return data.count(k) > 0; }

    /// The virtual-dimension admissibility test for genus-zero keys: a key
    /// failing it carries the value 0 without being stored.
    bool dim_admissible(const CorrKey& k) const;
    bool stable(const CorrKey& k) const;

    /// Value lookup. Returns 0 for dimension-violating, unstable, or
    /// beyond-polynomial-support keys; throws Underdetermined when the key is
    /// admissible but absent.
    FieldElem value(const CorrKey& k) const;
    std::optional<FieldElem> try_value(const CorrKey& k) const;

    void insert(CorrKey k, FieldElem v, Provenance p);
};

CorrelatorTable ingest(std::istream& in, RingPtr ring, const std::string& source = "<gw>");
CorrelatorTable ingest_file(const std::string& path, RingPtr ring);

Report dimension_audit(const CorrelatorTable& t);

/// Axiom reductions. Each computes the key's value from strictly smaller
/// keys, consulting the table; preconditions per the genus-zero axioms.
FieldElem reduce_string(const CorrelatorTable& t, const CorrKey& k);
FieldElem reduce_dilaton(const CorrelatorTable& t, const CorrKey& k);
FieldElem reduce_divisor(const CorrelatorTable& t, const CorrKey& k, int divisor_idx);
FieldElem trr_reduce(const CorrelatorTable& t, const CorrKey& k);

/// Close the table under the genus-zero axioms out to the target bounds.
/// Derivation is by equation propagation: every axiom instance with exactly
/// one unknown key is solved for it, so the divisor/string equations also run
/// "upward" to reconstruct low-point descendants. Confluence is verified by
/// re-running with the reversed instance order; disagreement raises
/// Inconsistent, unresolved admissible keys raise Underdetermined.
CorrelatorTable close_table(const CorrelatorTable& seed, const GwBounds& target);

/// Audit mode: every stored genus-zero key is recomputed through each
/// applicable reduction; mismatches are reported.
Report self_consistency_audit(const CorrelatorTable& t);

/// Gerbe twist: multiply every value by zeta_N^{N * (x . d)} where x is a
/// rational phase vector over the Novikov variables.
CorrelatorTable twist(const CorrelatorTable& t, const std::vector<Rat>& phase);

/// All stable, dimension-admissible genus-zero keys within the bounds, with
/// degree support restricted to the table's effective monoid.
std::vector<CorrKey> admissible_keys(const CorrelatorTable& t, const GwBounds& b);

/// Effective degree vectors (the support monoid) within the total cap,
/// including zero.
std::vector<std::vector<int>> ne_degrees(const CorrelatorTable& t, long cap);

}  // namespace gwcone
