#include "gwcone/gwtable.hpp"

#include <algorithm>
#include <climits>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace gwcone {

std::string key_str(const CorrKey& k, const Ring& ring) {
    std::ostringstream os;
    os << "<";
    for (size_t i = 0; i < k.ins.size(); ++i) {
        if (i) os << ",";
        os << ring.basis[k.ins[i].cls].name;
        if (k.ins[i].psi > 0) os << "*psi^" << k.ins[i].psi;
    }
    os << ">_{" << k.genus << "," << k.n() << ",(";
    for (size_t i = 0; i < k.degree.size(); ++i) {
        if (i) os << ",";
        if (k.degree[i] % ring.novikov_denom == 0)
            os << k.degree[i] / ring.novikov_denom;
        else
            os << k.degree[i] << "/" << ring.novikov_denom;
    }
    os << ")}";
    return os.str();
}

GwBounds GwBounds::infer() { return GwBounds{}; }

std::vector<int> CorrelatorTable::poly_max() const {
    std::vector<int> m(ring->novikov.size(), 0);
    for (const auto& [k, v] : data)
        for (size_t i = 0; i < m.size(); ++i) m[i] = std::max(m[i], k.degree[i]);
    return m;
}

bool CorrelatorTable::dim_admissible(const CorrKey& k) const {
    if (k.genus != 0) return true;
    Rat lhs = 0;
    for (const auto& i : k.ins) lhs += rat_of(ring->degree(i.cls), 2) + Rat(i.psi);
    std::vector<Rat> d(k.degree.size());
    for (size_t i = 0; i < d.size(); ++i) d[i] = rat_of(k.degree[i], ring->novikov_denom);
    Rat rhs = Rat(ring->dim_c) + ring->c1_dot(d) + Rat(k.n()) - 3;
    return lhs == rhs;
}

bool CorrelatorTable::stable(const CorrKey& k) const {
    if (!k.deg_zero()) return true;
    return 2 * k.genus - 2 + k.n() > 0;
}

namespace {

// Monoid of effective degrees: sums of degrees present in the table plus the
// declared extra classes, capped componentwise. Zero-degree is always in.
struct NeMonoid {
    std::vector<std::vector<int>> gens;
    mutable std::map<std::vector<int>, bool> memo;

    bool contains(const std::vector<int>& d) const {
        bool all0 = true;
        for (int x : d) {
            if (x < 0) return false;
            if (x != 0) all0 = false;
        }
        if (all0) return true;
        auto it = memo.find(d);
        if (it != memo.end()) return it->second;
        memo.emplace(d, false);  // cycle guard
        bool ok = false;
        for (const auto& g : gens) {
            std::vector<int> rest(d.size());
            bool fits = true;
            bool moved = false;
            for (size_t i = 0; i < d.size(); ++i) {
                rest[i] = d[i] - g[i];
                if (rest[i] < 0) fits = false;
                if (g[i] > 0) moved = true;
            }
            if (!fits || !moved) continue;
            if (contains(rest)) {
                ok = true;
                break;
            }
        }
        memo[d] = ok;
        return ok;
    }
};

const NeMonoid& ne_monoid_of(const CorrelatorTable& t) {
    if (!t.ne_cache) {
        auto m = std::make_shared<NeMonoid>();
        std::set<std::vector<int>> gens;
        for (const auto& [k, v] : t.data)
            if (!v.is_zero() && !k.deg_zero()) gens.insert(k.degree);
        for (const auto& d : t.extra_ne) gens.insert(d);
        m->gens.assign(gens.begin(), gens.end());
        t.ne_cache = m;
    }
    return *static_cast<NeMonoid*>(t.ne_cache.get());
}

}  // namespace

std::optional<FieldElem> CorrelatorTable::try_value(const CorrKey& key) const {
    CorrKey k = key;
    k.canonicalize();
    auto it = data.find(k);
    if (it != data.end()) return it->second;
    if (!stable(k)) return FieldElem::zero(ring->cfg);
    if (k.genus == 0 && !dim_admissible(k)) return FieldElem::zero(ring->cfg);
    // the degree-zero three-point stratum is the classical triple product
    if (k.genus == 0 && k.deg_zero() && k.n() == 3 && k.psi_total() == 0) {
        auto vec = [&](int c) {
            std::vector<FieldElem> v(ring->size(), FieldElem::zero(ring->cfg));
            v[c] = FieldElem::one(ring->cfg);
            return v;
        };
        return ring->pair(ring->cup(vec(k.ins[0].cls), vec(k.ins[1].cls)), vec(k.ins[2].cls));
    }
    // degree-zero, psi-free invariants with n >= 4 vanish: the moduli space
    // is M_{0,n} x Z and the integrand is pulled back from Z alone
    if (k.genus == 0 && k.deg_zero() && k.n() >= 4 && k.psi_total() == 0)
        return FieldElem::zero(ring->cfg);
    if (!poly_cache) poly_cache = std::make_shared<std::vector<int>>(poly_max());
    for (size_t i = 0; i < bounds.poly_var.size() && i < k.degree.size(); ++i)
        if (bounds.poly_var[i] && k.degree[i] > (*poly_cache)[i])
            return FieldElem::zero(ring->cfg);
    // effectivity: degrees outside the declared/observed monoid vanish
    if (!k.deg_zero() && !ne_monoid_of(*this).contains(k.degree))
        return FieldElem::zero(ring->cfg);
    return std::nullopt;
}

FieldElem CorrelatorTable::value(const CorrKey& key) const {
    auto v = try_value(key);
    if (!v) throw Underdetermined("missing correlator " + key_str(key, *ring));
    return *v;
}

void CorrelatorTable::insert(CorrKey k, FieldElem v, Provenance p) {
    k.canonicalize();
    if (k.genus < 0) throw GwError("negative genus");
    if ((int)k.degree.size() != (int)ring->novikov.size())
        throw GwError("degree vector length mismatch in " + key_str(k, *ring));
    for (int d : k.degree)
        if (d < 0) throw GwError("negative degree in " + key_str(k, *ring));
    for (const auto& i : k.ins) {
        if (i.cls < 0 || i.cls >= ring->size())
            throw GwError("insertion index out of range in correlator record");
        if (i.psi < 0) throw GwError("negative psi power");
    }
    auto it = data.find(k);
    if (it != data.end()) {
        if (!(it->second == v))
            throw Inconsistent("conflicting values for " + key_str(k, *ring) + ": " +
                               it->second.str() + " vs " + v.str() + " (" +
                               prov.at(k).rule + " vs " + p.rule + ")");
        return;
    }
    if (k.genus == 0 && k.deg_zero() && k.n() == 3 && k.psi_total() == 0) {
        auto cls = try_value(k);
        if (cls && !(*cls == v))
            throw Inconsistent("record " + key_str(k, *ring) + " = " + v.str() +
                               " contradicts the classical triple product " + cls->str());
        if (cls && *cls == v) return;  // already known from the ring
    }
    data.emplace(k, std::move(v));
    prov.emplace(k, std::move(p));
    ne_cache.reset();
    poly_cache.reset();
}

// --------------------------------------------------------------------- ingest

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

std::vector<int> parse_degree(const std::string& text, const Ring& ring) {
    std::vector<int> deg;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, ',')) {
        Rat q = parse_rational(cur);
        Rat scaled = q * ring.novikov_denom;
        if (scaled.get_den() != 1)
            throw GwError("degree " + cur + " not a multiple of 1/" +
                          std::to_string(ring.novikov_denom));
        deg.push_back((int)scaled.get_num().get_si());
    }
    if (text.empty()) deg.clear();
    if ((int)deg.size() != (int)ring.novikov.size())
        throw GwError("degree vector has wrong length: " + text);
    return deg;
}

}  // namespace

CorrelatorTable ingest(std::istream& in, RingPtr ring, const std::string& source) {
    CorrelatorTable t;
    t.ring = std::move(ring);
    t.bounds.poly_var.assign(t.ring->novikov.size(), false);
    bool have_bounds = false;
    auto fail = [&](const std::string& what) { throw GwError(source + ": " + what); };

    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "end") break;
        if (toks[0] == "gw") {
            if (toks.size() > 1 && toks[1] != t.ring->name)
                fail("gw file is for ring " + toks[1] + ", not " + t.ring->name);
        } else if (toks[0] == "bounds") {
            have_bounds = true;
            for (size_t i = 1; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) fail("bad bounds field: " + toks[i]);
                std::string key = toks[i].substr(0, eq), val = toks[i].substr(eq + 1);
                if (key == "n") t.bounds.max_n = std::stoi(val);
                else if (key == "psi") t.bounds.max_psi = std::stoi(val);
                else if (key == "genus") t.bounds.max_genus = std::stoi(val);
                else if (key == "deg") {
                    Rat q = parse_rational(val) * t.ring->novikov_denom;
                    t.bounds.deg_cap = (long)q.get_num().get_si() / (long)q.get_den().get_si();
                } else
                    fail("bad bounds key: " + key);
            }
        } else if (toks[0] == "polynomial") {
            for (size_t i = 1; i < toks.size(); ++i) {
                bool found = false;
                for (size_t v = 0; v < t.ring->novikov.size(); ++v)
                    if (t.ring->novikov[v] == toks[i]) {
                        t.bounds.poly_var[v] = true;
                        found = true;
                    }
                if (!found) fail("polynomial: unknown Novikov variable " + toks[i]);
            }
        } else if (toks[0] == "ne") {
            t.extra_ne.push_back(parse_degree(toks.at(1), *t.ring));
        } else if (toks[0] == "inv") {
            CorrKey k;
            FieldElem val;
            bool have_val = false;
            for (size_t i = 1; i < toks.size(); ++i) {
                auto eq = toks[i].find('=');
                if (eq == std::string::npos) fail("bad inv field: " + toks[i]);
                std::string key = toks[i].substr(0, eq), v = toks[i].substr(eq + 1);
                if (key == "g") k.genus = std::stoi(v);
                else if (key == "d") k.degree = parse_degree(v, *t.ring);
                else if (key == "ins") {
                    size_t pos = 0;
                    while (pos < v.size()) {
                        if (v[pos] != '(') fail("bad insertion list: " + v);
                        auto close = v.find(')', pos);
                        auto colon = v.find(':', pos);
                        if (close == std::string::npos || colon == std::string::npos ||
                            colon > close)
                            fail("bad insertion list: " + v);
                        Insertion ins;
                        ins.cls = std::stoi(v.substr(pos + 1, colon - pos - 1));
                        ins.psi = std::stoi(v.substr(colon + 1, close - colon - 1));
                        k.ins.push_back(ins);
                        pos = close + 1;
                    }
                } else if (key == "val") {
                    val = parse_expr(v, t.ring->cfg);
                    have_val = true;
                } else
                    fail("bad inv key: " + key);
            }
            if (!have_val) fail("inv record without val=");
            if (k.degree.empty()) k.degree.assign(t.ring->novikov.size(), 0);
            if (!t.stable(k)) fail("unstable key " + key_str(k, *t.ring));
            t.insert(std::move(k), std::move(val), {"seed", source});
        } else {
            fail("unrecognized line: " + line);
        }
    }
    if (!have_bounds) {
        for (const auto& [k, v] : t.data) {
            t.bounds.max_n = std::max(t.bounds.max_n, k.n());
            t.bounds.max_genus = std::max(t.bounds.max_genus, k.genus);
            for (const auto& i : k.ins) t.bounds.max_psi = std::max(t.bounds.max_psi, i.psi);
            t.bounds.deg_cap = std::max(t.bounds.deg_cap, k.deg_total());
        }
    }
    return t;
}

CorrelatorTable ingest_file(const std::string& path, RingPtr ring) {
    std::ifstream in(path);
    if (!in) throw GwError("cannot open gw file: " + path);
    return ingest(in, std::move(ring), path);
}

Report dimension_audit(const CorrelatorTable& t) {
    Report rep;
    int violations = 0;
    for (const auto& [k, v] : t.data) {
        if (k.genus != 0) continue;
        if (t.dim_admissible(k)) continue;
        if (v.is_zero()) {
            rep.warn("dimension", "zero value on dimension-violating key " + key_str(k, *t.ring));
        } else {
            rep.fail("dimension", "nonzero value on dimension-violating key " +
                                      key_str(k, *t.ring) + " = " + v.str());
            ++violations;
        }
    }
    if (violations == 0) rep.pass("dimension", "all genus-0 records satisfy the dimension axiom");
    return rep;
}

// ----------------------------------------------------------- axiom equations

namespace {

// value(lhs) = sum_j coef_j * value(rhs_j); rhs duplicates merged
struct LinearEq {
    const char* rule;
    CorrKey lhs;
    std::vector<std::pair<FieldElem, CorrKey>> rhs;
};

int count_of(const std::vector<Insertion>& ins, const Insertion& t) {
    int c = 0;
    for (const auto& i : ins)
        if (i == t) ++c;
    return c;
}

std::vector<Insertion> minus_one(const std::vector<Insertion>& ins, const Insertion& t) {
    std::vector<Insertion> out;
    bool removed = false;
    for (const auto& i : ins) {
        if (!removed && i == t) {
            removed = true;
            continue;
        }
        out.push_back(i);
    }
    return out;
}

void add_rhs(LinearEq& eq, FieldElem c, CorrKey k) {
    k.canonicalize();
    for (auto& [ec, ek] : eq.rhs)
        if (ek == k) {
            ec += c;
            return;
        }
    eq.rhs.emplace_back(std::move(c), std::move(k));
}

std::optional<LinearEq> string_eq(const CorrelatorTable& t, const CorrKey& k) {
    if (k.genus != 0) return std::nullopt;
    Insertion unit{0, 0};
    if (count_of(k.ins, unit) == 0) return std::nullopt;
    if (k.n() - 1 < 3 && k.deg_zero()) return std::nullopt;
    LinearEq eq{"string", k, {}};
    auto rest = minus_one(k.ins, unit);
    std::set<std::pair<int, int>> seen;
    for (const auto& i : rest) {
        if (i.psi == 0) continue;
        if (!seen.insert({i.cls, i.psi}).second) continue;
        CorrKey down;
        down.genus = 0;
        down.degree = k.degree;
        down.ins = minus_one(rest, i);
        down.ins.push_back({i.cls, i.psi - 1});
        add_rhs(eq, FieldElem(t.ring->cfg, Rat(count_of(rest, i))), std::move(down));
    }
    return eq;
}

std::optional<LinearEq> dilaton_eq(const CorrelatorTable& t, const CorrKey& k) {
    if (k.genus != 0) return std::nullopt;
    Insertion dil{0, 1};
    if (count_of(k.ins, dil) == 0) return std::nullopt;
    if (k.n() - 1 < 3 && k.deg_zero()) return std::nullopt;
    LinearEq eq{"dilaton", k, {}};
    CorrKey down;
    down.genus = 0;
    down.degree = k.degree;
    down.ins = minus_one(k.ins, dil);
    long coef = 2 * k.genus - 2 + (long)down.ins.size();
    add_rhs(eq, FieldElem(t.ring->cfg, Rat(coef)), std::move(down));
    return eq;
}

std::optional<LinearEq> divisor_eq(const CorrelatorTable& t, const CorrKey& k, int idx) {
    if (k.genus != 0) return std::nullopt;
    const Ring& ring = *t.ring;
    if (idx < 1 || idx >= ring.size()) return std::nullopt;
    if (ring.degree(idx) != 2 || ring.basis[idx].twisted) return std::nullopt;
    if (idx > (int)ring.novikov.size()) return std::nullopt;  // needs phi_i . d
    Insertion div{idx, 0};
    if (count_of(k.ins, div) == 0) return std::nullopt;
    if (k.n() - 1 < 3 && k.deg_zero()) return std::nullopt;
    LinearEq eq{"divisor", k, {}};
    auto rest = minus_one(k.ins, div);
    CorrKey down;
    down.genus = 0;
    down.degree = k.degree;
    down.ins = rest;
    Rat di = rat_of(k.degree[idx - 1], ring.novikov_denom);
    add_rhs(eq, FieldElem(ring.cfg, di), std::move(down));
    std::set<std::pair<int, int>> seen;
    for (const auto& i : rest) {
        if (i.psi == 0) continue;
        if (!seen.insert({i.cls, i.psi}).second) continue;
        const auto& row = ring.classical_product(idx, i.cls);
        int mult = count_of(rest, i);
        for (int c = 0; c < ring.size(); ++c) {
            if (row[c].is_zero()) continue;
            CorrKey corr;
            corr.genus = 0;
            corr.degree = k.degree;
            corr.ins = minus_one(rest, i);
            corr.ins.push_back({c, i.psi - 1});
            add_rhs(eq, FieldElem(ring.cfg, Rat(mult)) * row[c], std::move(corr));
        }
    }
    return eq;
}

// Topological recursion: the first sorted insertion carrying psi >= 1 drops a
// power; the last two insertions of the remainder anchor the second factor;
// middle pair runs over the Poincare-dual basis. Unstable bubbles are
// excluded. Validated against the string-equation oracle on the point.
struct TrrTerm {
    FieldElem coef;
    CorrKey a, b;
};

std::optional<std::vector<TrrTerm>> trr_terms(const CorrelatorTable& t, const CorrKey& k) {
    if (k.genus != 0 || k.n() < 3) return std::nullopt;
    const Ring& ring = *t.ring;
    int drop = -1;
    for (size_t i = 0; i < k.ins.size(); ++i)
        if (k.ins[i].psi >= 1) {
            drop = (int)i;
            break;
        }
    if (drop < 0) return std::nullopt;
    std::vector<Insertion> rest;
    for (size_t i = 0; i < k.ins.size(); ++i)
        if ((int)i != drop) rest.push_back(k.ins[i]);
    Insertion gamma1{k.ins[drop].cls, k.ins[drop].psi - 1};
    Insertion anchor2 = rest[rest.size() - 2];
    Insertion anchor3 = rest[rest.size() - 1];
    std::vector<Insertion> leftover(rest.begin(), rest.end() - 2);

    // distinct leftover insertion types with multiplicities
    std::vector<std::pair<Insertion, int>> types;
    for (const auto& i : leftover) {
        bool found = false;
        for (auto& [ti, tc] : types)
            if (ti == i) {
                ++tc;
                found = true;
            }
        if (!found) types.push_back({i, 1});
    }

    const FMatrix& dual = ring.dual_basis();
    std::vector<TrrTerm> terms;

    // enumerate sub-multisets of leftover by choice vector
    std::vector<int> choice(types.size(), 0);
    auto binom = [](int n, int r) {
        Rat b = 1;
        for (int i = 0; i < r; ++i) b = b * (n - i) / (i + 1);
        return b;
    };
    auto degree_splits = [&](const std::vector<int>& d) {
        std::vector<std::vector<int>> splits;  // d1 per split, d2 = d - d1
        std::vector<int> cur(d.size(), 0);
        std::function<void(size_t)> rec = [&](size_t pos) {
            if (pos == d.size()) {
                splits.push_back(cur);
                return;
            }
            for (int v = 0; v <= d[pos]; ++v) {
                cur[pos] = v;
                rec(pos + 1);
            }
        };
        rec(0);
        return splits;
    };
    auto splits = degree_splits(k.degree);

    while (true) {
        Rat mult = 1;
        for (size_t i = 0; i < types.size(); ++i) mult *= binom(types[i].second, choice[i]);
        std::vector<Insertion> s1, s2;
        for (size_t i = 0; i < types.size(); ++i) {
            for (int c = 0; c < choice[i]; ++c) s1.push_back(types[i].first);
            for (int c = choice[i]; c < types[i].second; ++c) s2.push_back(types[i].first);
        }
        for (const auto& d1 : splits) {
            std::vector<int> d2(k.degree.size());
            for (size_t i = 0; i < d2.size(); ++i) d2[i] = k.degree[i] - d1[i];
            // stability of the first bubble: nodes + insertions >= 3 or d1 != 0
            bool d1zero = true;
            for (int v : d1)
                if (v) d1zero = false;
            if (d1zero && (int)s1.size() + 2 < 3) continue;
            for (int eps = 0; eps < ring.size(); ++eps)
                for (int mu = 0; mu < ring.size(); ++mu) {
                    if (dual.at(eps, mu).is_zero()) continue;
                    CorrKey a;
                    a.genus = 0;
                    a.degree = d1;
                    a.ins = s1;
                    a.ins.push_back(gamma1);
                    a.ins.push_back({eps, 0});
                    a.canonicalize();
                    CorrKey b;
                    b.genus = 0;
                    b.degree = d2;
                    b.ins = s2;
                    b.ins.push_back({mu, 0});
                    b.ins.push_back(anchor2);
                    b.ins.push_back(anchor3);
                    b.canonicalize();
                    terms.push_back({FieldElem(ring.cfg, mult) * dual.at(eps, mu), a, b});
                }
        }
        // next choice vector
        size_t pos = 0;
        while (pos < types.size()) {
            if (choice[pos] < types[pos].second) {
                ++choice[pos];
                break;
            }
            choice[pos] = 0;
            ++pos;
        }
        if (pos == types.size()) break;
    }
    return terms;
}

std::optional<FieldElem> eval_eq_rhs(const CorrelatorTable& t, const LinearEq& eq) {
    FieldElem sum = FieldElem::zero(t.ring->cfg);
    for (const auto& [c, k] : eq.rhs) {
        auto v = t.try_value(k);
        if (!v) return std::nullopt;
        sum += c * (*v);
    }
    return sum;
}

std::optional<FieldElem> eval_trr(const CorrelatorTable& t, const std::vector<TrrTerm>& terms) {
    FieldElem sum = FieldElem::zero(t.ring->cfg);
    for (const auto& term : terms) {
        auto va = t.try_value(term.a);
        if (!va) return std::nullopt;
        if (va->is_zero()) continue;
        auto vb = t.try_value(term.b);
        if (!vb) return std::nullopt;
        sum += term.coef * (*va) * (*vb);
    }
    return sum;
}

void require_even(const Ring& ring, const char* what) {
    if (ring.has_odd_classes())
        throw GwError(std::string(what) +
                      ": odd-degree classes are not supported by the axiom engine");
}

}  // namespace

FieldElem reduce_string(const CorrelatorTable& t, const CorrKey& key) {
    require_even(*t.ring, "string");
    CorrKey k = key;
    k.canonicalize();
    auto eq = string_eq(t, k);
    if (!eq) throw GwError("string equation not applicable to " + key_str(k, *t.ring));
    auto v = eval_eq_rhs(t, *eq);
    if (!v) {
        for (const auto& [c, rk] : eq->rhs)
            if (!t.try_value(rk))
                throw Underdetermined("string reduction of " + key_str(k, *t.ring) +
                                      " needs missing " + key_str(rk, *t.ring));
        throw Underdetermined("string reduction of " + key_str(k, *t.ring) + " underdetermined");
    }
    return *v;
}

FieldElem reduce_dilaton(const CorrelatorTable& t, const CorrKey& key) {
    require_even(*t.ring, "dilaton");
    CorrKey k = key;
    k.canonicalize();
    auto eq = dilaton_eq(t, k);
    if (!eq) throw GwError("dilaton equation not applicable to " + key_str(k, *t.ring));
    auto v = eval_eq_rhs(t, *eq);
    if (!v) throw Underdetermined("dilaton reduction of " + key_str(k, *t.ring) +
                                  " needs a missing lower key");
    return *v;
}

FieldElem reduce_divisor(const CorrelatorTable& t, const CorrKey& key, int idx) {
    require_even(*t.ring, "divisor");
    CorrKey k = key;
    k.canonicalize();
    auto eq = divisor_eq(t, k, idx);
    if (!eq) throw GwError("divisor equation not applicable to " + key_str(k, *t.ring) +
                           " at index " + std::to_string(idx));
    auto v = eval_eq_rhs(t, *eq);
    if (!v) throw Underdetermined("divisor reduction of " + key_str(k, *t.ring) +
                                  " needs a missing lower key");
    return *v;
}

FieldElem trr_reduce(const CorrelatorTable& t, const CorrKey& key) {
    require_even(*t.ring, "trr");
    CorrKey k = key;
    k.canonicalize();
    if (k.genus != 0 || k.n() < 3 || k.psi_total() == 0)
        throw GwError("topological recursion not applicable to " + key_str(k, *t.ring));
    auto terms = trr_terms(t, k);
    auto v = eval_trr(t, *terms);
    if (!v) {
        for (const auto& term : *terms) {
            if (!t.try_value(term.a))
                throw Underdetermined("trr reduction of " + key_str(k, *t.ring) +
                                      " needs missing " + key_str(term.a, *t.ring));
            if (!t.try_value(term.b))
                throw Underdetermined("trr reduction of " + key_str(k, *t.ring) +
                                      " needs missing " + key_str(term.b, *t.ring));
        }
        throw Underdetermined("trr reduction of " + key_str(k, *t.ring) + " underdetermined");
    }
    return *v;
}

// -------------------------------------------------------------------- closure

namespace {

// All stable, dimension-admissible genus-zero keys within the bounds, with
// degree support restricted to the table's effective monoid and polynomial
// caps.
std::vector<CorrKey> enumerate_candidates(const CorrelatorTable& t, const GwBounds& b) {
    const Ring& ring = *t.ring;
    std::vector<CorrKey> out;
    NeMonoid ne = ne_monoid_of(t);
    auto pmax = t.poly_max();

    // degree vectors
    std::vector<std::vector<int>> degrees;
    std::vector<int> cur(ring.novikov.size(), 0);
    std::function<void(size_t, long)> rec_deg = [&](size_t pos, long total) {
        if (pos == cur.size()) {
            degrees.push_back(cur);
            return;
        }
        int cap = (int)std::min<long>(b.deg_cap - total, INT_MAX);
        if (pos < b.poly_var.size() && b.poly_var[pos]) cap = std::min(cap, pmax[pos]);
        for (int v = 0; v <= cap; ++v) {
            cur[pos] = v;
            rec_deg(pos + 1, total + v);
        }
        cur[pos] = 0;
    };
    rec_deg(0, 0);

    // insertion options sorted
    std::vector<Insertion> opts;
    for (int c = 0; c < ring.size(); ++c)
        for (int p = 0; p <= b.max_psi; ++p) opts.push_back({c, p});

    for (const auto& d : degrees) {
        bool dzero = true;
        for (int v : d)
            if (v) dzero = false;
        if (!dzero && !ne.contains(d)) continue;
        std::vector<Rat> dq(d.size());
        for (size_t i = 0; i < d.size(); ++i) dq[i] = rat_of(d[i], ring.novikov_denom);
        Rat c1d = ring.c1_dot(dq);
        for (int n = dzero ? 3 : 0; n <= b.max_n; ++n) {
            Rat target = Rat(ring.dim_c) + c1d + Rat(n) - 3;
            if (target < 0) continue;
            if (target.get_den() != 1) continue;
            // enumerate non-decreasing insertion sequences hitting the target
            std::vector<Insertion> ins;
            std::function<void(size_t, int, Rat)> rec = [&](size_t oi, int left, Rat remain) {
                if (left == 0) {
                    if (remain == 0) {
                        CorrKey k;
                        k.genus = 0;
                        k.degree = d;
                        k.ins = ins;
                        out.push_back(std::move(k));
                    }
                    return;
                }
                if (oi >= opts.size()) return;
                if (remain < 0) return;
                // max contribution per remaining slot
                Rat maxper = Rat(ring.dim_c) + b.max_psi;
                if (remain > maxper * left) return;
                // skip option oi entirely
                rec(oi + 1, left, remain);
                // take one copy of option oi
                Rat w = rat_of(ring.degree(opts[oi].cls), 2) + opts[oi].psi;
                ins.push_back(opts[oi]);
                rec(oi, left - 1, remain - w);
                ins.pop_back();
            };
            rec(0, n, target);
        }
    }
    return out;
}

}  // namespace

std::vector<CorrKey> admissible_keys(const CorrelatorTable& t, const GwBounds& b) {
    return enumerate_candidates(t, b);
}

std::vector<std::vector<int>> ne_degrees(const CorrelatorTable& t, long cap) {
    const NeMonoid& ne = ne_monoid_of(t);
    std::vector<std::vector<int>> out;
    std::vector<int> cur(t.ring->novikov.size(), 0);
    std::function<void(size_t, long)> rec = [&](size_t pos, long total) {
        if (pos == cur.size()) {
            bool zero = true;
            for (int v : cur)
                if (v) zero = false;
            if (zero || ne.contains(cur)) out.push_back(cur);
            return;
        }
        for (int v = 0; total + v <= cap; ++v) {
            cur[pos] = v;
            rec(pos + 1, total + v);
        }
        cur[pos] = 0;
    };
    rec(0, 0);
    return out;
}

CorrelatorTable close_table(const CorrelatorTable& seed, const GwBounds& target) {
    require_even(*seed.ring, "close_table");
    GwBounds work = target;
    work.max_n += 1;
    work.max_psi += 1;
    work.poly_var = seed.bounds.poly_var;

    CorrelatorTable probe = seed;
    probe.bounds = work;
    const auto candidates = enumerate_candidates(probe, work);

    // axiom instances depend only on the ring and the key; build them once
    std::vector<LinearEq> all_eqs;
    for (const auto& key : candidates) {
        if (auto e = string_eq(probe, key)) all_eqs.push_back(std::move(*e));
        if (auto e = dilaton_eq(probe, key)) all_eqs.push_back(std::move(*e));
        for (int i = 1; i <= (int)probe.ring->novikov.size(); ++i)
            if (auto e = divisor_eq(probe, key, i)) all_eqs.push_back(std::move(*e));
    }
    std::map<CorrKey, std::vector<TrrTerm>> trr_memo;
    auto trr_of = [&](const CorrelatorTable& t, const CorrKey& key) -> const std::vector<TrrTerm>* {
        if (key.n() < 3 || key.psi_total() == 0) return nullptr;
        auto it = trr_memo.find(key);
        if (it == trr_memo.end()) {
            auto terms = trr_terms(t, key);
            it = trr_memo.emplace(key, terms ? std::move(*terms) : std::vector<TrrTerm>{}).first;
        }
        return &it->second;
    };

    auto run = [&](bool reversed, bool verify) {
        CorrelatorTable t = seed;
        t.bounds = work;
        std::vector<LinearEq> eqs = all_eqs;
        std::vector<CorrKey> cands = candidates;
        if (reversed) {
            std::reverse(eqs.begin(), eqs.end());
            std::reverse(cands.begin(), cands.end());
        }

        bool progress = true;
        while (progress) {
            progress = false;
            std::map<CorrKey, std::optional<FieldElem>> cache;  // valid this round
            auto lookup = [&](const CorrKey& k) -> const std::optional<FieldElem>& {
                auto it = cache.find(k);
                if (it == cache.end()) it = cache.emplace(k, t.try_value(k)).first;
                return it->second;
            };
            for (const auto& eq : eqs) {
                bool lhs_known = lookup(eq.lhs).has_value();
                int unknowns = lhs_known ? 0 : 1;
                int missing_rhs = -1;
                for (size_t j = 0; j < eq.rhs.size(); ++j)
                    if (!lookup(eq.rhs[j].second)) {
                        ++unknowns;
                        missing_rhs = (int)j;
                    }
                if (unknowns != 1) continue;
                if (!lhs_known) {
                    FieldElem v = FieldElem::zero(t.ring->cfg);
                    for (const auto& [c, k] : eq.rhs) v += c * *lookup(k);
                    t.insert(eq.lhs, v, {eq.rule, "from lower keys"});
                    cache[eq.lhs] = v;
                    progress = true;
                } else if (!eq.rhs[missing_rhs].first.is_zero()) {
                    FieldElem rest = FieldElem::zero(t.ring->cfg);
                    for (size_t j = 0; j < eq.rhs.size(); ++j) {
                        if ((int)j == missing_rhs) continue;
                        rest += eq.rhs[j].first * *lookup(eq.rhs[j].second);
                    }
                    FieldElem v = (*lookup(eq.lhs) - rest) / eq.rhs[missing_rhs].first;
                    t.insert(eq.rhs[missing_rhs].second, v,
                             {std::string(eq.rule) + "-inverse",
                              "solved from " + key_str(eq.lhs, *t.ring)});
                    cache[eq.rhs[missing_rhs].second] = v;
                    progress = true;
                }
            }
            // topological recursion, forward only
            for (const auto& key : cands) {
                if (lookup(key)) continue;
                const auto* terms = trr_of(t, key);
                if (!terms) continue;
                FieldElem sum = FieldElem::zero(t.ring->cfg);
                bool complete = true;
                for (const auto& term : *terms) {
                    const auto& va = lookup(term.a);
                    if (!va) {
                        complete = false;
                        break;
                    }
                    if (va->is_zero()) continue;
                    const auto& vb = lookup(term.b);
                    if (!vb) {
                        complete = false;
                        break;
                    }
                    sum += term.coef * *va * *vb;
                }
                if (complete) {
                    t.insert(key, sum, {"trr", "from lower keys"});
                    cache[key] = sum;
                    progress = true;
                }
            }
        }

        if (!verify) return t;
        // consistency: every fully-known axiom instance must balance
        for (const auto& eq : eqs) {
            auto lv = t.try_value(eq.lhs);
            if (!lv) continue;
            auto rv = eval_eq_rhs(t, eq);
            if (!rv) continue;
            if (!(*lv == *rv))
                throw Inconsistent("equation " + std::string(eq.rule) + " violated at " +
                                   key_str(eq.lhs, *t.ring) + ": stored " + lv->str() + " (via " +
                                   t.prov.at(eq.lhs).rule + ") vs recomputed " + rv->str());
        }
        for (const auto& key : cands) {
            auto lv = t.try_value(key);
            if (!lv) continue;
            const auto* terms = trr_of(t, key);
            if (!terms || terms->empty()) continue;
            auto rv = eval_trr(t, *terms);
            if (rv && !(*lv == *rv))
                throw Inconsistent("topological recursion violated at " + key_str(key, *t.ring) +
                                   ": stored " + lv->str() + " (via " + t.prov.at(key).rule +
                                   ") vs recomputed " + rv->str());
        }
        return t;
    };

    CorrelatorTable closed = run(false, true);
    CorrelatorTable closed_rev = run(true, false);
    if (closed.data != closed_rev.data)
        throw Inconsistent("closure is rule-order dependent (confluence check failed)");

    // underdetermined scan against the *target* bounds
    CorrelatorTable out;
    out.ring = seed.ring;
    out.bounds = target;
    out.bounds.poly_var = seed.bounds.poly_var;
    out.extra_ne = seed.extra_ne;
    for (const auto& [k, v] : closed.data) {
        if (k.genus == 0 && (k.n() > target.max_n || k.deg_total() > target.deg_cap)) continue;
        bool psi_ok = true;
        for (const auto& i : k.ins)
            if (i.psi > target.max_psi) psi_ok = false;
        if (k.genus == 0 && !psi_ok) continue;
        out.insert(k, v, closed.prov.at(k));
    }
    for (const auto& key : enumerate_candidates(out, target))
        if (!out.try_value(key))
            throw Underdetermined("closure left " + key_str(key, *seed.ring) +
                                  " undetermined; seed lacks primitive data");
    return out;
}

Report self_consistency_audit(const CorrelatorTable& t) {
    Report rep;
    int checked = 0;
    for (const auto& [key, val] : t.data) {
        if (key.genus != 0) continue;
        std::vector<LinearEq> eqs;
        if (auto e = string_eq(t, key)) eqs.push_back(std::move(*e));
        if (auto e = dilaton_eq(t, key)) eqs.push_back(std::move(*e));
        for (int i = 1; i <= (int)t.ring->novikov.size(); ++i)
            if (auto e = divisor_eq(t, key, i)) eqs.push_back(std::move(*e));
        for (const auto& eq : eqs) {
            auto rv = eval_eq_rhs(t, eq);
            if (!rv) continue;
            ++checked;
            if (!(*rv == val))
                rep.fail(eq.rule, "stored " + key_str(key, *t.ring) + " = " + val.str() +
                                      " but reduction gives " + rv->str());
        }
        if (key.n() >= 3 && key.psi_total() > 0) {
            auto terms = trr_terms(t, key);
            std::optional<FieldElem> rv;
            if (terms) rv = eval_trr(t, *terms);
            if (rv) {
                ++checked;
                if (!(*rv == val))
                    rep.fail("trr", "stored " + key_str(key, *t.ring) + " = " + val.str() +
                                        " but reduction gives " + rv->str());
            }
        }
    }
    if (rep.ok())
        rep.pass("self-consistency",
                 "all stored values reproduce under applicable reductions (" +
                     std::to_string(checked) + " checks)");
    return rep;
}

CorrelatorTable twist(const CorrelatorTable& t, const std::vector<Rat>& phase) {
    if (phase.size() != t.ring->novikov.size())
        throw GwError("phase vector length must match Novikov variables");
    int order = t.ring->cfg->root_order();
    for (const auto& x : phase) {
        Rat scaled = x * order;
        if (scaled.get_den() != 1)
            throw GwError("phase denominator of " + rat_str(x) + " does not divide the ring's" +
                          " cyclotomic order " + std::to_string(order));
    }
    CorrelatorTable out = t;
    out.data.clear();
    out.prov.clear();
    for (const auto& [k, v] : t.data) {
        Rat xd = 0;
        for (size_t i = 0; i < phase.size(); ++i)
            xd += phase[i] * rat_of(k.degree[i], t.ring->novikov_denom);
        Rat e = xd * order;
        if (e.get_den() != 1)
            throw GwError("phase * degree not integral for " + key_str(k, *t.ring));
        FieldElem z = FieldElem::root_pow(t.ring->cfg, e.get_num().get_si());
        out.insert(k, v * z, t.prov.at(k));
    }
    return out;
}

}  // namespace gwcone
