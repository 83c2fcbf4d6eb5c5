#include "gwcone/genpair.hpp"

#include <functional>
#include <sstream>

namespace gwcone {

namespace {

RingPtr make_pair_ring(const std::string& name, bool resolution, bool cr_twisted_product) {
    auto r = make_ring();
    r->name = name;
    r->dim_c = 3;
    r->cfg = FieldConfig::make({{"i", 4}});
    if (resolution) {
        r->basis = {{"1", 0, false},  {"h1", 2, false}, {"h2", 2, false},
                    {"k1", 4, false}, {"k2", 4, false}, {"w", 6, false}};
        r->novikov = {"Q1", "Q2"};
        r->c1 = {Rat(0), Rat(0)};
    } else {
        r->basis = {{"1", 0, false},  {"p", 2, false},  {"t", 2, true},
                    {"ph", 4, false}, {"th", 4, true},  {"v", 6, false}};
        r->novikov = {"U1"};
        r->c1 = {Rat(0)};
    }
    r->novikov_denom = 1;
    int n = 6;
    r->pairing = FMatrix(n, n, r->cfg);
    auto one = FieldElem::one(r->cfg);
    r->pairing.at(0, 5) = one;
    r->pairing.at(5, 0) = one;
    r->pairing.at(1, 3) = one;
    r->pairing.at(3, 1) = one;
    r->pairing.at(2, 4) = one;
    r->pairing.at(4, 2) = one;
    r->product.assign(n, std::vector<std::vector<FieldElem>>(
                             n, std::vector<FieldElem>(n, FieldElem::zero(r->cfg))));
    for (int b = 0; b < n; ++b) {
        r->product[0][b][b] = one;
        if (b != 0) r->product[b][0][b] = one;
    }
    auto set = [&](int a, int b, int c) {
        r->product[a][b][c] = one;
        if (a != b) r->product[b][a][c] = one;
    };
    // pairing-forced top products
    set(1, 3, 5);
    set(2, 4, 5);
    if (cr_twisted_product) set(2, 2, 4);  // the Chen-Ruan correction t.t = th
    return seal_ring(r);
}

CorrKey mk_key(std::vector<int> deg, std::vector<Insertion> ins) {
    CorrKey k;
    k.degree = std::move(deg);
    k.ins = std::move(ins);
    k.canonicalize();
    return k;
}

// Seed the free data (keys without unit or divisor insertions) and close.
CorrelatorTable closed_x_table(const RingPtr& rx, long deg_bound, int max_n, int t_idx,
                               const std::function<FieldElem(const CorrKey&)>& choose) {
    CorrelatorTable t;
    t.ring = rx;
    // declare the polynomial flags only after seeding: the enumerator caps
    // polynomial variables at the data's support
    t.bounds.poly_var.assign(rx->novikov.size(), false);
    t.bounds.max_n = max_n;
    t.bounds.max_psi = 1;
    t.bounds.deg_cap = deg_bound;
    t.extra_ne.push_back({1});

    GwBounds fb;
    fb.max_n = max_n;
    fb.max_psi = 1;
    fb.deg_cap = deg_bound;
    fb.poly_var = t.bounds.poly_var;
    for (const auto& key : admissible_keys(t, fb)) {
        bool free_key = true;
        for (const auto& i : key.ins)
            if (i.cls == 0 || i.cls == 1 || i.psi > 0) free_key = false;
        if (!free_key || key.deg_zero()) continue;
        FieldElem v = choose(key);
        t.insert(key, v, {"seed", "generator"});
    }
    (void)t_idx;
    t.bounds.poly_var.assign(rx->novikov.size(), true);
    GwBounds target = fb;
    target.poly_var = t.bounds.poly_var;
    return close_table(t, target);
}

}  // namespace

SyntheticPair gen_pair_crc(long deg_bound) {
    SyntheticPair out;
    out.ringX = make_pair_ring("Xsynth", false, true);
    out.ringY = make_pair_ring("Ysynth", true, false);
    out.rm.ringX = out.ringX;
    out.rm.ringY = out.ringY;
    out.rm.s = 1;
    out.rm.r = 2;
    out.rm.validate();
    auto cfg = out.ringX->cfg;
    int n = 6;
    const int kT = 2, kTh = 4;

    // X data: <t,t,t>_1 = 1 and the one-point <t>_1 = 1 feeding the mirror map
    out.tableX = closed_x_table(out.ringX, deg_bound, 3, kT, [&](const CorrKey& k) {
        if (k == mk_key({1}, {{kT, 0}, {kT, 0}, {kT, 0}})) return FieldElem::one(cfg);
        if (k == mk_key({1}, {{kT, 0}})) return FieldElem::one(cfg);
        return FieldElem::zero(cfg);
    });

    // U = e^{-c/z} (I + A z) with c = (1/2) i h2 and A = E_{t, th}
    out.phases = {Rat(0), rat_of(1, 2)};
    LaurentMatrix base = LaurentMatrix::identity(out.ringX, out.ringY, cfg);
    base.at(kT, kTh).add(1, FieldElem::one(cfg));  // A z
    std::vector<FieldElem> negc(n, FieldElem::zero(cfg));
    negc[2] = FieldElem(cfg, rat_of(-1, 2)) * FieldElem::root_pow(cfg, 1);
    out.u = gerbe_shift(base, negc);

    // mirror map produced by this U: f_2 = -<t>_1 U1 (sign (-1)^{w/2+1}, w=4)
    auto sp = make_space(out.ringX, {});
    OrderSpec so = OrderSpec::exact(1);
    so.nov_cap = deg_bound;
    so.coord_cap = 0;
    Series f2(sp, so);
    {
        SKey k;
        k.nov = {1};
        k.coord = {};
        f2.add_term(k, -FieldElem::one(cfg));
    }

    // Solve the Y-side three-point data order by order so that the
    // substituted product reproduces the (transported) X product:
    //   cup_Y + sum_m S(m) U^m (-1) e^{f_2} = C^X.
    Series einv = exp_series(-f2);  // = e^{+U1 <t>_1}
    out.tableY.ring = out.ringY;
    out.tableY.bounds.poly_var = {false, true};
    out.tableY.bounds.max_n = 3;
    out.tableY.bounds.max_psi = 0;
    out.tableY.bounds.deg_cap = deg_bound + 1;

    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b) {
            // D = C^X_{ab} - cup_Y as an H-valued series over sp
            Series cx = small_quantum_product(out.tableX, a, b, so);
            Series d(sp, so);
            for (const auto& [k, c] : cx.terms()) {
                SKey nk;
                nk.nov = k.nov;
                nk.coord = {};
                nk.comp = k.comp;
                d.add_term(nk, c);
            }
            for (int c = 0; c < n; ++c) {
                const FieldElem& cup = out.ringY->classical_product(a, b)[c];
                if (!cup.is_zero()) {
                    SKey nk;
                    nk.nov = {0};
                    nk.coord = {};
                    nk.comp = c;
                    d.add_term(nk, -cup);
                }
            }
            if (d.is_zero()) continue;
            // S-series = - D e^{-f} componentwise; V_{abc}(m) = sum_i G(c,i) S^i(m)
            for (int i = 0; i < n; ++i) {
                Series si = d.component(i) * einv;
                for (const auto& [k, coefv] : si.terms()) {
                    long m = k.nov[0];
                    FieldElem sval = -coefv;
                    for (int c = 0; c < n; ++c) {
                        if (out.ringY->pairing.at(c, i).is_zero()) continue;
                        FieldElem v = out.ringY->pairing.at(c, i) * sval;
                        if (v.is_zero()) continue;
                        // the same correlator arises from several product
                        // pairs; the solves must agree on it
                        CorrKey key = mk_key({(int)m, 1}, {{a, 0}, {b, 0}, {c, 0}});
                        out.tableY.insert(key, v, {"seed", "generator"});
                    }
                }
            }
        }
    // the assemblers query every admissible key in the support monoid:
    // absent ones must be explicit zeros, not underdetermined gaps
    {
        GwBounds yb;
        yb.max_n = 3;
        yb.max_psi = 0;
        yb.deg_cap = out.tableY.bounds.deg_cap;
        yb.poly_var = out.tableY.bounds.poly_var;
        for (const auto& key : admissible_keys(out.tableY, yb))
            if (!out.tableY.try_value(key))
                out.tableY.insert(key, FieldElem::zero(cfg), {"seed", "generator-zero"});
    }
    return out;
}

SyntheticPair gen_pair_bg(long deg_bound, int max_n) {
    SyntheticPair out;
    out.ringX = make_pair_ring("XsynthHL", false, false);  // cup-transport X
    out.ringY = make_pair_ring("YsynthHL", true, false);
    out.rm.ringX = out.ringX;
    out.rm.ringY = out.ringY;
    out.rm.s = 1;
    out.rm.r = 2;
    out.rm.validate();
    auto cfg = out.ringX->cfg;
    const int kT = 2;
    out.phases = {Rat(0), Rat(0)};

    // quantum data rides the divisor direction: the 0-point invariants are
    // the free seeds, everything else follows from the divisor equation; the
    // t-direction stays classical so the transported table satisfies the
    // divisor axiom of the untwisted resolution ring
    out.tableX = closed_x_table(out.ringX, deg_bound, max_n, kT, [&](const CorrKey& k) {
        if (k.ins.empty()) return FieldElem::one(cfg);  // < >_m = 1
        return FieldElem::zero(cfg);
    });

    out.u = LaurentMatrix::identity(out.ringX, out.ringY, cfg);

    // Y table: the straight transport, degrees (m) -> (m, 0)
    out.tableY.ring = out.ringY;
    out.tableY.bounds.poly_var = {false, true};
    out.tableY.bounds.max_n = out.tableX.bounds.max_n;
    out.tableY.bounds.max_psi = out.tableX.bounds.max_psi;
    out.tableY.bounds.deg_cap = out.tableX.bounds.deg_cap;
    for (const auto& [k, v] : out.tableX.data) {
        CorrKey ky = k;
        ky.degree = {k.degree[0], 0};
        out.tableY.insert(ky, v, {"seed", "transport"});
    }
    return out;
}

// ------------------------------------------------------------------ renderers

std::string render_ring(const Ring& r) {
    std::ostringstream os;
    os << "ring " << r.name << "\n";
    os << "dimc " << r.dim_c << "\n";
    if (r.cfg->gen_count() > 0 || r.cfg->root_order() > 1) {
        os << "consts";
        for (const auto& d : r.cfg->decls()) {
            os << " " << d.name;
            if (d.is_root()) os << ":root" << d.root_order;
        }
        os << "\n";
    }
    os << "novikov " << r.novikov.size();
    for (const auto& v : r.novikov) os << " " << v;
    os << " denom " << r.novikov_denom << "\n";
    if (!r.c1.empty()) {
        os << "c1";
        for (const auto& c : r.c1) os << " " << rat_str(c);
        os << "\n";
    }
    os << "basis " << r.size() << "\n";
    for (int i = 0; i < r.size(); ++i) {
        os << i << " " << r.basis[i].name << " " << r.basis[i].degree;
        if (r.basis[i].twisted) os << " twisted";
        os << "\n";
    }
    os << "pairing\n";
    for (int i = 0; i < r.size(); ++i)
        for (int j = i; j < r.size(); ++j)
            if (!r.pairing.at(i, j).is_zero())
                os << i << " " << j << " " << r.pairing.at(i, j).str() << "\n";
    os << "classical\n";
    for (int i = 1; i < r.size(); ++i)
        for (int j = i; j < r.size(); ++j) {
            bool any = false;
            std::ostringstream line;
            line << i << " " << j << " :";
            for (int c = 0; c < r.size(); ++c)
                if (!r.product[i][j][c].is_zero()) {
                    line << " " << c << ":" << r.product[i][j][c].str();
                    any = true;
                }
            if (any) os << line.str() << "\n";
        }
    os << "end\n";
    return os.str();
}

std::string render_gw(const CorrelatorTable& t) {
    std::ostringstream os;
    os << "gw " << t.ring->name << "\n";
    os << "bounds n=" << t.bounds.max_n << " psi=" << t.bounds.max_psi
       << " genus=" << t.bounds.max_genus << " deg=";
    Rat cap = rat_of(t.bounds.deg_cap, t.ring->novikov_denom);
    os << rat_str(cap) << "\n";
    bool any_poly = false;
    for (size_t i = 0; i < t.bounds.poly_var.size(); ++i)
        if (t.bounds.poly_var[i]) any_poly = true;
    if (any_poly) {
        os << "polynomial";
        for (size_t i = 0; i < t.bounds.poly_var.size(); ++i)
            if (t.bounds.poly_var[i]) os << " " << t.ring->novikov[i];
        os << "\n";
    }
    for (const auto& d : t.extra_ne) {
        os << "ne ";
        for (size_t i = 0; i < d.size(); ++i) {
            if (i) os << ",";
            os << rat_str(rat_of(d[i], t.ring->novikov_denom));
        }
        os << "\n";
    }
    for (const auto& [k, v] : t.data) {
        os << "inv g=" << k.genus << " d=";
        for (size_t i = 0; i < k.degree.size(); ++i) {
            if (i) os << ",";
            os << rat_str(rat_of(k.degree[i], t.ring->novikov_denom));
        }
        os << " ins=";
        for (const auto& ins : k.ins) os << "(" << ins.cls << ":" << ins.psi << ")";
        std::string vs = v.str();
        std::string compact;
        for (char c : vs)
            if (!isspace((unsigned char)c)) compact += c;
        os << " val=" << compact << "\n";
    }
    os << "end\n";
    return os.str();
}

std::string render_umat(const LaurentMatrix& u) {
    std::ostringstream os;
    os << "umat n=" << u.n << " ringX=" << u.ringX->name << " ringY=" << u.ringY->name;
    if (u.cfg->gen_count() > 0 || u.cfg->root_order() > 1) {
        os << " consts";
        for (const auto& d : u.cfg->decls()) {
            os << " " << d.name;
            if (d.is_root()) os << ":root" << d.root_order;
        }
    }
    os << "\n";
    for (int i = 0; i < u.n; ++i)
        for (int j = 0; j < u.n; ++j) {
            if (u.at(i, j).is_zero()) continue;
            os << "entry " << i << " " << j << " :";
            bool first = true;
            for (const auto& [e, c] : u.at(i, j).coef) {
                os << (first ? " " : " + ");
                first = false;
                std::string cs = c.str();
                std::string compact;
                for (char ch : cs)
                    if (!isspace((unsigned char)ch)) compact += ch;
                os << "(" << compact << ")*z^" << e;
            }
            os << "\n";
        }
    os << "end\n";
    return os.str();
}

std::string render_resmap(const ResolutionMap& rm) {
    std::ostringstream os;
    os << "resmap X=" << rm.ringX->name << " Y=" << rm.ringY->name << " s=" << rm.s
       << " r=" << rm.r << "\nend\n";
    return os.str();
}

}  // namespace gwcone
