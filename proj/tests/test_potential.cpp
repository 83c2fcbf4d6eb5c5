#include "doctest.h"

#include "gwcone/potential.hpp"

#include <sstream>

using namespace gwcone;

namespace {

const char* kP1Ring = R"(
ring P1
dimc 1
novikov 1 Q1 denom 1
c1 2
basis 2
0 1 0
1 h 2
pairing
0 1 1
classical
1 1 :
end
)";

const char* kPtRing = R"(
ring pt
dimc 0
novikov 0 denom 1
basis 1
0 1 0
pairing
0 0 1
classical
end
)";

RingPtr ring_of(const char* text) {
    std::istringstream in(text);
    return load_ring(in);
}

CorrelatorTable closed_point(int max_n, int max_psi) {
    std::istringstream in(R"(
gw pt
inv g=0 d= ins=(0:0)(0:0)(0:0) val=1
end
)");
    auto seed = ingest(in, ring_of(kPtRing));
    GwBounds b;
    b.max_n = max_n;
    b.max_psi = max_psi;
    b.deg_cap = 0;
    return close_table(seed, b);
}

CorrelatorTable closed_p1(int max_n, int max_psi, long deg) {
    std::istringstream in(R"(
gw P1
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1
end
)");
    auto seed = ingest(in, ring_of(kP1Ring));
    GwBounds b;
    b.max_n = max_n;
    b.max_psi = max_psi;
    b.deg_cap = deg;
    return close_table(seed, b);
}

SKey sk(std::vector<int> nov, std::vector<int> coord, int z = 0, int comp = -1) {
    SKey k;
    k.nov = std::move(nov);
    k.coord = std::move(coord);
    k.z = z;
    k.comp = comp;
    return k;
}

}  // namespace

TEST_CASE("point potential is t^3/6") {
    auto t = closed_point(5, 1);
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 3;
    Series f = genus0_potential(t, o);
    CHECK(f.terms().size() == 1);
    CHECK(f.coeff(sk({}, {3})) == FieldElem(rat_of(1, 6)));
}

TEST_CASE("empty table gives the classical-only potential") {
    CorrelatorTable t;
    t.ring = ring_of(kPtRing);
    t.bounds.poly_var.assign(0, false);
    t.bounds.max_n = 3;
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 3;
    // the classical stratum is ring data, so even an empty table yields t^3/6
    Series f = genus0_potential(t, o);
    CHECK(f.coeff(sk({}, {3})) == FieldElem(rat_of(1, 6)));
}

TEST_CASE("P1 potential: coefficient of Q t1^3 is 1/6") {
    auto t = closed_p1(6, 2, 2);
    OrderSpec o = OrderSpec::exact(1);
    o.coord_cap = 4;
    o.nov_cap = 2;
    Series f = genus0_potential(t, o);
    CHECK(f.coeff(sk({1}, {0, 3})) == FieldElem(rat_of(1, 6)));
}

TEST_CASE("missing correlator within order is an error naming the key") {
    // CY-type surrogate: c1 = 0 keeps every degree dimension-admissible,
    // so requesting an order beyond the closed support must fail loudly
    std::istringstream rin(R"(
ring E
dimc 1
novikov 1 Q1 denom 1
c1 0
basis 2
0 1 0
1 h 2
pairing
0 1 1
classical
1 1 :
end
)");
    auto ring = load_ring(rin);
    std::istringstream gin(R"(
gw E
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=3
end
)");
    auto seed = ingest(gin, ring);
    GwBounds b;
    b.max_n = 4;
    b.max_psi = 0;
    b.deg_cap = 1;
    auto t = close_table(seed, b);
    OrderSpec o = OrderSpec::exact(1);
    o.coord_cap = 3;
    o.nov_cap = 1;
    CHECK(!genus0_potential(t, o).is_zero());
    o.nov_cap = 2;  // degree-2 keys are admissible but never closed
    CHECK_THROWS_AS(genus0_potential(t, o), Underdetermined);
}

TEST_CASE("descendant potential coefficient from <psi,1,1,1>") {
    auto t = closed_point(5, 2);
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 4;
    Series f = descendant_potential(t, o, 1);
    // <psi.1,1,1,1> = 1 contributes t1_0 t0^3 / 3!
    CHECK(f.coeff(sk({}, {3, 1})) == FieldElem(rat_of(1, 6)));
    // psi_max 0 restricts to the plain potential
    Series f0 = descendant_potential(t, o, 0);
    CHECK(f0 == genus0_potential(t, o));
}

TEST_CASE("P1 small quantum product: h * h = Q 1") {
    auto t = closed_p1(6, 2, 3);
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 3;
    o.coord_cap = 0;
    Series p = small_quantum_product(t, 1, 1, o);
    // expect exactly Q * [1]
    CHECK(p.terms().size() == 1);
    CHECK(p.coeff(sk({1}, {0, 0}, 0, 0)).is_one());

    // 1 * x = x
    Series unit = small_quantum_product(t, 0, 1, o);
    CHECK(unit.terms().size() == 1);
    CHECK(unit.coeff(sk({0}, {0, 0}, 0, 1)).is_one());

    // point: 1 * 1 = 1
    auto pt = closed_point(4, 1);
    OrderSpec op = OrderSpec::exact(0);
    op.coord_cap = 0;
    Series pp = small_quantum_product(pt, 0, 0, op);
    CHECK(pp.coeff(sk({}, {0}, 0, 0)).is_one());
}

TEST_CASE("big product at tau = 0 equals the small product") {
    auto t = closed_p1(7, 2, 3);
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 3;
    o.coord_cap = 2;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
            Series big = big_quantum_product(t, a, b, o);
            std::map<std::string, Series::Binding> zero;
            zero.emplace("t0", Series::bind_value(FieldElem::zero(t.ring->cfg)));
            zero.emplace("t1", Series::bind_value(FieldElem::zero(t.ring->cfg)));
            Series at0 = big.substituted(zero);
            OrderSpec so = o;
            so.coord_cap = 0;
            Series small = small_quantum_product(t, a, b, so);
            CHECK(first_mismatch(at0, small) == std::nullopt);
        }
}

TEST_CASE("P1 wdvv audit passes") {
    auto t = closed_p1(7, 2, 3);
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 3;
    o.coord_cap = 2;
    Report rep = wdvv_audit(t, o);
    CHECK(rep.ok());
}

TEST_CASE("classical-only table passes wdvv (cup associativity)") {
    CorrelatorTable t;
    t.ring = ring_of(kP1Ring);
    t.bounds.poly_var.assign(1, false);
    t.bounds.max_n = 4;
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 0;
    o.coord_cap = 1;
    CHECK(wdvv_audit(t, o).ok());
}

TEST_CASE("perturbed 4-point value breaks wdvv") {
    // P2: classical ring plus the one-line quantum seed <p,p>_{0,2,1} = 1
    std::istringstream rin(R"(
ring P2
dimc 2
novikov 1 Q1 denom 1
c1 3
basis 3
0 1 0
1 h 2
2 p 4
pairing
0 2 1
1 1 1
classical
1 1 : 2:1
1 2 :
2 2 :
end
)");
    auto ring = load_ring(rin);
    std::istringstream gin(R"(
gw P2
inv g=0 d=1 ins=(2:0)(2:0) val=1
end
)");
    auto seed = ingest(gin, ring);
    GwBounds b;
    b.max_n = 5;
    b.max_psi = 1;
    b.deg_cap = 1;
    auto t = close_table(seed, b);
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 1;
    o.coord_cap = 2;
    CHECK(wdvv_audit(t, o).ok());

    // perturb one 4-point value; the audit must flag a violated coefficient
    CorrKey k4;
    k4.degree = {1};
    k4.ins = {{1, 0}, {1, 0}, {2, 0}, {2, 0}};
    k4.canonicalize();
    REQUIRE(t.stored(k4));
    auto bad = t;
    bad.data.erase(k4);
    bad.prov.erase(k4);
    bad.insert(k4, t.value(k4) + FieldElem(Rat(1)), {"seed", "perturbed"});
    Report rep = wdvv_audit(bad, o);
    CHECK(!rep.ok());
}

TEST_CASE("modified potential: no exceptional variables is a renaming") {
    auto t = closed_p1(5, 1, 2);
    ResolutionMap rm;
    rm.ringX = t.ring;
    rm.ringY = t.ring;
    rm.s = 1;
    rm.r = 1;
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 2;
    o.coord_cap = 3;
    CHECK(modified_potential(t, rm, o) == genus0_potential(t, o));
}

TEST_CASE("modified potential: terminating exceptional substitution") {
    // two Novikov variables, second exceptional with polynomial support
    std::istringstream rin(R"(
ring Ytoy
dimc 3
novikov 2 Q1 Q2 denom 1
c1 0 0
basis 6
0 1 0
1 h1 2
2 h2 2
3 k1 4
4 k2 4
5 v 6
pairing
0 5 1
1 3 1
2 4 1
classical
1 3 : 5:1
2 4 : 5:1
end
)");
    auto ring = load_ring(rin);
    std::istringstream gin(R"(
gw Ytoy
bounds n=4 psi=1 genus=0 deg=1
polynomial Q2
inv g=0 d=0,1 ins=(2:0)(2:0)(2:0) val=5
inv g=0 d=0,1 ins=(1:0)(2:0)(2:0) val=0
inv g=0 d=0,1 ins=(1:0)(1:0)(2:0) val=0
inv g=0 d=0,1 ins=(1:0)(1:0)(1:0) val=0
end
)");
    GwBounds cb;
    cb.max_n = 4;
    cb.max_psi = 0;
    cb.deg_cap = 1;
    auto t = close_table(ingest(gin, ring), cb);
    ResolutionMap rm;
    rm.ringX = ring;  // stand-in; only s and r matter here
    rm.ringY = ring;
    rm.s = 1;
    rm.r = 2;
    OrderSpec o = OrderSpec::exact(2);
    o.nov_cap = 1;
    o.coord_cap = 3;
    Series f = modified_potential(t, rm, o);
    // the Q2-record lands in the Q-free stratum: coefficient of t2^3 is 5/3!
    CHECK(f.coeff(sk({0, 0}, {0, 0, 3, 0, 0, 0})) == FieldElem(rat_of(5, 6)));

    // unbounded exceptional dependence is rejected
    auto bad = t;
    bad.bounds.poly_var[1] = false;
    CHECK_THROWS_WITH_AS(modified_potential(bad, rm, o), doctest::Contains("non-terminating"),
                         SeriesError);
}

TEST_CASE("odd-degree classes are rejected by the potential assembly") {
    std::istringstream in(R"(
ring torus
dimc 1
novikov 0 denom 1
basis 4
0 1 0
1 a 1
2 b 1
3 v 2
pairing
0 3 1
1 2 1
classical
1 2 : 3:1
end
)");
    auto r = load_ring(in);
    CorrelatorTable t;
    t.ring = r;
    t.bounds.poly_var.assign(0, false);
    t.bounds.max_n = 3;
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 3;
    CHECK_THROWS_WITH_AS(genus0_potential(t, o), doctest::Contains("odd-degree"), GwError);
}
