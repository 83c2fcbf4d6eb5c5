#include "gwcone/ring.hpp"

#include <fstream>
#include <sstream>

namespace gwcone {

bool Ring::has_odd_classes() const {
    for (const auto& b : basis)
        if (b.degree % 2 != 0) return true;
    return false;
}

const std::vector<FieldElem>& Ring::classical_product(int a, int b) const {
    if (a < 0 || a >= size() || b < 0 || b >= size()) throw RingError("basis index out of range");
    return product[a][b];
}

std::vector<FieldElem> Ring::cup(const std::vector<FieldElem>& u,
                                 const std::vector<FieldElem>& v) const {
    std::vector<FieldElem> out(size(), FieldElem::zero(cfg));
    for (int a = 0; a < size(); ++a) {
        if (u[a].is_zero()) continue;
        for (int b = 0; b < size(); ++b) {
            if (v[b].is_zero()) continue;
            FieldElem f = u[a] * v[b];
            for (int c = 0; c < size(); ++c)
                if (!product[a][b][c].is_zero()) out[c] += f * product[a][b][c];
        }
    }
    return out;
}

FieldElem Ring::pair(const std::vector<FieldElem>& u, const std::vector<FieldElem>& v) const {
    FieldElem s = FieldElem::zero(cfg);
    for (int a = 0; a < size(); ++a) {
        if (u[a].is_zero()) continue;
        for (int b = 0; b < size(); ++b)
            if (!v[b].is_zero() && !pairing.at(a, b).is_zero()) s += u[a] * v[b] * pairing.at(a, b);
    }
    return s;
}

FMatrix Ring::cup_matrix(int a) const {
    FMatrix m(size(), size(), cfg);
    for (int b = 0; b < size(); ++b)
        for (int c = 0; c < size(); ++c) m.at(c, b) = product[a][b][c];
    return m;
}

Rat Ring::c1_dot(const std::vector<Rat>& d) const {
    Rat s = 0;
    for (size_t i = 0; i < c1.size() && i < d.size(); ++i) s += c1[i] * d[i];
    return s;
}

void Ring::validate() const {
    int n = size();
    if (n == 0) throw RingError(name + ": empty basis");
    if (basis[0].degree != 0 || basis[0].name != "1")
        throw RingError(name + ": basis index 0 must be \"1\" of degree 0");
    for (const auto& b : basis)
        if (b.degree < 0) throw RingError(name + ": negative degree on " + b.name);
    for (int i = 1; i <= (int)novikov.size(); ++i) {
        if (i >= n || basis[i].degree != 2)
            throw RingError(name + ": basis index " + std::to_string(i) +
                            " must have degree 2 (one per Novikov variable)");
    }
    if (!c1.empty() && c1.size() != novikov.size())
        throw RingError(name + ": c1 length does not match Novikov variables");

    // pairing: degree compatibility and nondegeneracy
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (pairing.at(i, j).is_zero()) continue;
            if (basis[i].degree + basis[j].degree != 2 * dim_c)
                throw RingError(name + ": degree mismatch in pairing entry (" +
                                std::to_string(i) + "," + std::to_string(j) + ")");
        }
    if (!pairing.is_invertible()) throw RingError(name + ": degenerate pairing");

    auto sign = [&](int a, int b) {
        return (basis[a].degree % 2 != 0 && basis[b].degree % 2 != 0) ? -1 : 1;
    };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            FieldElem rhs = pairing.at(j, i);
            if (sign(i, j) < 0) rhs = -rhs;
            if (!(pairing.at(i, j) == rhs))
                throw RingError(name + ": pairing not supersymmetric at (" + std::to_string(i) +
                                "," + std::to_string(j) + ")");
        }

    // classical product: unital, graded, supercommutative, Frobenius,
    // associative
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            FieldElem expect = (b == c) ? FieldElem::one(cfg) : FieldElem::zero(cfg);
            if (!(product[0][b][c] == expect))
                throw RingError(name + ": product with 1 is not the identity");
        }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                if (product[a][b][c].is_zero()) continue;
                if (basis[c].degree != basis[a].degree + basis[b].degree)
                    throw RingError(name + ": ungraded product entry " + basis[a].name + "*" +
                                    basis[b].name);
            }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                FieldElem rhs = product[b][a][c];
                if (sign(a, b) < 0) rhs = -rhs;
                if (!(product[a][b][c] == rhs))
                    throw RingError(name + ": product not supercommutative at (" + basis[a].name +
                                    "," + basis[b].name + ")");
            }
    auto basis_vec = [&](int a) {
        std::vector<FieldElem> v(n, FieldElem::zero(cfg));
        v[a] = FieldElem::one(cfg);
        return v;
    };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                FieldElem lhs = pair(cup(basis_vec(a), basis_vec(b)), basis_vec(c));
                FieldElem rhs = pair(basis_vec(a), cup(basis_vec(b), basis_vec(c)));
                if (!(lhs == rhs))
                    throw RingError(name + ": classical table not Frobenius at (" + basis[a].name +
                                    "," + basis[b].name + "," + basis[c].name + ")");
            }
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                auto lhs = cup(cup(basis_vec(a), basis_vec(b)), basis_vec(c));
                auto rhs = cup(basis_vec(a), cup(basis_vec(b), basis_vec(c)));
                if (!(lhs == rhs))
                    throw RingError(name + ": classical table not associative at (" +
                                    basis[a].name + "," + basis[b].name + "," + basis[c].name +
                                    ")");
            }
}

std::shared_ptr<Ring> make_ring() { return std::make_shared<Ring>(); }

RingPtr seal_ring(std::shared_ptr<Ring> r) {
    r->dual_ = r->pairing.inverse();
    r->validate();
    return r;
}

// ----------------------------------------------------------------- ring files

namespace {

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string tok;
    while (is >> tok) out.push_back(tok);
    return out;
}

}  // namespace

RingPtr load_ring(std::istream& in, const std::string& source_name) {
    auto ring = std::make_shared<Ring>();
    std::string line;
    std::vector<ConstDecl> decls;
    bool have_consts = false;
    auto fail = [&](const std::string& what) { throw RingError(source_name + ": " + what); };

    enum class Section { Head, Pairing, Classical } section = Section::Head;
    int n = -1;
    std::vector<std::tuple<int, int, std::string>> pairing_raw;
    std::vector<std::tuple<int, int, std::string>> classical_raw;

    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        const std::string& kw = toks[0];
        if (kw == "end") break;
        if (kw == "ring") {
            if (toks.size() != 2) fail("ring line needs a name");
            ring->name = toks[1];
        } else if (kw == "dimc") {
            ring->dim_c = std::stoi(toks.at(1));
        } else if (kw == "consts") {
            have_consts = true;
            for (size_t i = 1; i < toks.size(); ++i) {
                auto colon = toks[i].find(':');
                if (colon == std::string::npos) {
                    decls.push_back({toks[i], 0});
                } else {
                    std::string kind = toks[i].substr(colon + 1);
                    if (kind.rfind("root", 0) != 0) fail("bad const kind: " + toks[i]);
                    decls.push_back({toks[i].substr(0, colon), std::stoi(kind.substr(4))});
                }
            }
        } else if (kw == "novikov") {
            int k = std::stoi(toks.at(1));
            for (int i = 0; i < k; ++i) ring->novikov.push_back(toks.at(2 + i));
            if (toks.size() < (size_t)(4 + k) || toks[2 + k] != "denom") fail("novikov line needs denom");
            ring->novikov_denom = std::stoi(toks.at(3 + k));
            if (ring->novikov_denom < 1) fail("denom must be >= 1");
        } else if (kw == "c1") {
            for (size_t i = 1; i < toks.size(); ++i) ring->c1.push_back(parse_rational(toks[i]));
        } else if (kw == "basis") {
            n = std::stoi(toks.at(1));
            ring->basis.resize(n);
        } else if (kw == "pairing") {
            section = Section::Pairing;
        } else if (kw == "classical") {
            section = Section::Classical;
        } else if (section == Section::Head) {
            // basis element line: <idx> <name> <degree> [twisted]
            if (toks.size() < 3) fail("bad basis line: " + line);
            int idx = std::stoi(toks[0]);
            if (idx < 0 || idx >= n) fail("basis index out of range: " + toks[0]);
            ring->basis[idx].name = toks[1];
            ring->basis[idx].degree = std::stoi(toks[2]);
            ring->basis[idx].twisted = toks.size() > 3 && toks[3] == "twisted";
        } else if (section == Section::Pairing) {
            if (toks.size() < 3) fail("bad pairing line: " + line);
            std::string expr;
            for (size_t i = 2; i < toks.size(); ++i) expr += toks[i];
            pairing_raw.emplace_back(std::stoi(toks[0]), std::stoi(toks[1]), expr);
        } else if (section == Section::Classical) {
            // <i> <j> : <k>:<expr> ...   (an empty term list states a zero product)
            if (toks.size() < 3 || toks[2] != ":") fail("bad classical line: " + line);
            int i = std::stoi(toks[0]), j = std::stoi(toks[1]);
            for (size_t t = 3; t < toks.size(); ++t) {
                auto colon = toks[t].find(':');
                if (colon == std::string::npos) fail("bad classical term: " + toks[t]);
                classical_raw.emplace_back(i, j, toks[t]);
                (void)colon;
            }
        } else {
            fail("unrecognized line: " + line);
        }
    }
    if (n < 0) fail("missing basis section");
    ring->cfg = have_consts ? FieldConfig::make(decls) : FieldConfig::rationals();

    ring->pairing = FMatrix(n, n, ring->cfg);
    for (const auto& [i, j, expr] : pairing_raw) {
        if (i < 0 || i >= n || j < 0 || j >= n) fail("pairing index out of range");
        FieldElem v = parse_expr(expr, ring->cfg);
        ring->pairing.at(i, j) = v;
        if (ring->pairing.at(j, i).is_zero() && i != j) {
            int s = (ring->basis[i].degree % 2 != 0 && ring->basis[j].degree % 2 != 0) ? -1 : 1;
            ring->pairing.at(j, i) = s < 0 ? -v : v;
        }
    }

    ring->product.assign(n, std::vector<std::vector<FieldElem>>(
                                n, std::vector<FieldElem>(n, FieldElem::zero(ring->cfg))));
    for (int b = 0; b < n; ++b) {
        ring->product[0][b][b] = FieldElem::one(ring->cfg);
        if (b != 0) ring->product[b][0][b] = FieldElem::one(ring->cfg);
    }
    for (const auto& [i, j, term] : classical_raw) {
        if (i < 0 || i >= n || j < 0 || j >= n) fail("classical index out of range");
        auto colon = term.find(':');
        int k = std::stoi(term.substr(0, colon));
        if (k < 0 || k >= n) fail("classical target index out of range");
        FieldElem v = parse_expr(term.substr(colon + 1), ring->cfg);
        ring->product[i][j][k] = v;
        if (i != j && ring->product[j][i][k].is_zero()) {
            int s = (ring->basis[i].degree % 2 != 0 && ring->basis[j].degree % 2 != 0) ? -1 : 1;
            ring->product[j][i][k] = s < 0 ? -v : v;
        }
    }

    try {
        ring->dual_ = ring->pairing.inverse();
    } catch (const FieldError&) {
        fail("degenerate pairing");
    }
    ring->validate();
    return ring;
}

RingPtr load_ring_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw RingError("cannot open ring file: " + path);
    return load_ring(in, path);
}

// ------------------------------------------------------------- resolution map

void ResolutionMap::validate() const {
    if (!ringX || !ringY) throw RingError("resmap: missing rings");
    if (s > r || s < 0) throw RingError("resmap: need 0 <= s <= r");
    if ((int)ringX->novikov.size() != s)
        throw RingError("resmap: ring " + ringX->name + " must carry s=" + std::to_string(s) +
                        " Novikov variables");
    if ((int)ringY->novikov.size() != r)
        throw RingError("resmap: ring " + ringY->name + " must carry r=" + std::to_string(r) +
                        " Novikov variables");
    for (int i = 1; i <= r; ++i) {
        if (i >= ringX->size() || ringX->degree(i) != 2)
            throw RingError("resmap: X basis index " + std::to_string(i) + " must have degree 2");
        if (i >= ringY->size() || ringY->degree(i) != 2)
            throw RingError("resmap: Y basis index " + std::to_string(i) + " must have degree 2");
    }
    if (ringX->size() != ringY->size())
        throw RingError("resmap: rings have different rank");
}

ResolutionMap load_resmap(std::istream& in, RingPtr x, RingPtr y) {
    ResolutionMap m;
    m.ringX = std::move(x);
    m.ringY = std::move(y);
    std::string line;
    while (std::getline(in, line)) {
        auto toks = split_ws(line);
        if (toks.empty()) continue;
        if (toks[0] == "end") break;
        if (toks[0] != "resmap") throw RingError("bad resmap line: " + line);
        for (size_t i = 1; i < toks.size(); ++i) {
            auto eq = toks[i].find('=');
            if (eq == std::string::npos) throw RingError("bad resmap field: " + toks[i]);
            std::string key = toks[i].substr(0, eq), val = toks[i].substr(eq + 1);
            if (key == "s") m.s = std::stoi(val);
            else if (key == "r") m.r = std::stoi(val);
            else if (key == "X") {
                if (m.ringX && m.ringX->name != val)
                    throw RingError("resmap X ring name mismatch: " + val);
            } else if (key == "Y") {
                if (m.ringY && m.ringY->name != val)
                    throw RingError("resmap Y ring name mismatch: " + val);
            } else
                throw RingError("bad resmap key: " + key);
        }
    }
    m.validate();
    return m;
}

}  // namespace gwcone
