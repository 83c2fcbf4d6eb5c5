#include "doctest.h"

#include "gwcone/gwtable.hpp"

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

CorrelatorTable table_of(const char* gw, RingPtr ring) {
    std::istringstream in(gw);
    return ingest(in, std::move(ring));
}

CorrKey key(std::vector<int> deg, std::vector<Insertion> ins, int genus = 0) {
    CorrKey k;
    k.genus = genus;
    k.degree = std::move(deg);
    k.ins = std::move(ins);
    k.canonicalize();
    return k;
}

// Independent oracle for psi-integrals on the moduli of genus-zero stable
// curves: <psi^a1,...,psi^an>_{0,n,0} on the point via the pure string
// recursion. Lives only in test code.
Rat point_oracle(std::vector<int> a) {
    int n = (int)a.size();
    int total = 0;
    for (int x : a) total += x;
    if (n < 3) return 0;
    if (total != n - 3) return 0;
    if (n == 3) return 1;
    // remove one a_i = 0 via the string equation
    for (int i = 0; i < n; ++i) {
        if (a[i] != 0) continue;
        std::vector<int> rest;
        for (int j = 0; j < n; ++j)
            if (j != i) rest.push_back(a[j]);
        Rat sum = 0;
        for (size_t j = 0; j < rest.size(); ++j) {
            if (rest[j] == 0) continue;
            std::vector<int> dropped = rest;
            dropped[j] -= 1;
            sum += point_oracle(dropped);
        }
        return sum;
    }
    return 0;  // no zero entry: dimension forces one for n > 3
}

CorrelatorTable point_seed() {
    const char* gw = R"(
gw pt
bounds n=7 psi=4 genus=0 deg=0
inv g=0 d= ins=(0:0)(0:0)(0:0) val=1
end
)";
    return table_of(gw, ring_of(kPtRing));
}

CorrelatorTable p1_seed() {
    const char* gw = R"(
gw P1
bounds n=7 psi=4 genus=0 deg=3
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1
end
)";
    return table_of(gw, ring_of(kP1Ring));
}

}  // namespace

TEST_CASE("ingest: records, duplicates, range errors") {
    auto t = p1_seed();
    CHECK(t.data.size() == 1);
    CHECK(t.value(key({1}, {{1, 0}, {1, 0}, {1, 0}})).is_one());

    auto ring = ring_of(kP1Ring);
    std::istringstream dup(R"(
gw P1
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=2
end
)");
    CHECK_THROWS_AS(ingest(dup, ring), Inconsistent);

    std::istringstream oob(R"(
gw P1
inv g=0 d=1 ins=(7:0)(1:0)(1:0) val=1
end
)");
    CHECK_THROWS_AS(ingest(oob, ring), GwError);

    std::istringstream neg(R"(
gw P1
inv g=0 d=-1 ins=(1:0)(1:0)(1:0) val=1
end
)");
    CHECK_THROWS_AS(ingest(neg, ring), GwError);
}

TEST_CASE("dimension audit") {
    auto t = p1_seed();
    CHECK(dimension_audit(t).ok());  // <h,h,h>_{0,3,1}: 3 = 1 + 2 + 0

    auto bad = p1_seed();
    bad.insert(key({1}, {{1, 0}, {1, 0}, {0, 0}}), FieldElem(Rat(1)), {"seed", "test"});
    CHECK(!dimension_audit(bad).ok());

    CorrelatorTable empty;
    empty.ring = ring_of(kP1Ring);
    empty.bounds.poly_var.assign(1, false);
    CHECK(dimension_audit(empty).ok());
}

TEST_CASE("string reduction on the point") {
    auto t = point_seed();
    // <1,1,1,psi.1>_{0,4,0} -> <1,1,1> = 1
    CHECK(reduce_string(t, key({}, {{0, 0}, {0, 0}, {0, 0}, {0, 1}})).is_one());
    // no 1.psi^0 insertion: not applicable
    CHECK_THROWS_AS(reduce_string(t, key({}, {{0, 1}, {0, 1}, {0, 1}})), GwError);
    // P1: <1,h,h>_{0,3,1} -> 0 (no psi to decrement)
    auto p = p1_seed();
    CHECK(reduce_string(p, key({1}, {{0, 0}, {1, 0}, {1, 0}})).is_zero());
}

TEST_CASE("dilaton reduction on the point") {
    auto t = point_seed();
    // <psi.1,1,1,1>_{0,4,0} = (2g-2+3) * <1,1,1> = 1
    CHECK(reduce_dilaton(t, key({}, {{0, 1}, {0, 0}, {0, 0}, {0, 0}})).is_one());
    CHECK_THROWS_AS(reduce_dilaton(t, key({}, {{0, 0}, {0, 0}, {0, 0}, {0, 2}})), GwError);
}

TEST_CASE("divisor reduction on P1") {
    auto t = p1_seed();
    // <h,h,h,h>_{0,4,1} = (h.beta) <h,h,h>_{0,3,1} = 1
    CHECK(reduce_divisor(t, key({1}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}}), 1).is_one());
    // degree 0: <h,x,y>_{0,3,0} reproduces the classical cup integral,
    // but n-1 < 3 forbids the reduction; check the d=0, n=4 variant instead
    CHECK_THROWS_AS(reduce_divisor(t, key({}, {{1, 0}, {1, 0}, {0, 0}}), 1), GwError);
    // index with degree != 2 rejected
    CHECK_THROWS_AS(reduce_divisor(t, key({1}, {{1, 0}, {1, 0}, {1, 0}, {1, 0}}), 0), GwError);
}

TEST_CASE("closed point table matches the string-recursion oracle") {
    GwBounds target;
    target.max_n = 7;
    target.max_psi = 4;
    target.deg_cap = 0;
    target.max_genus = 0;
    auto closed = close_table(point_seed(), target);

    // every derived value equals the independent oracle
    for (const auto& [k, v] : closed.data) {
        std::vector<int> a;
        for (const auto& i : k.ins) a.push_back(i.psi);
        CHECK(v.rational_value() == point_oracle(a));
    }
    // the flagship values: <psi^(n-3),1,...,1>_{0,n,0} = 1
    CHECK(closed.value(key({}, {{0, 3}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})).is_one());
    CHECK(closed.value(key({}, {{0, 4}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}}))
              .is_one());
    // <psi^2,1,1,1,1>_{0,5,0} = 1 via TRR against the oracle
    CHECK(trr_reduce(closed, key({}, {{0, 2}, {0, 0}, {0, 0}, {0, 0}, {0, 0}})).is_one());
    CHECK(dimension_audit(closed).ok());
    CHECK(self_consistency_audit(closed).ok());
}

TEST_CASE("trr preconditions") {
    auto t = point_seed();
    CHECK_THROWS_AS(trr_reduce(t, key({}, {{0, 0}, {0, 0}, {0, 0}})), GwError);
}

TEST_CASE("closure: empty seed with nonempty target is underdetermined") {
    // a declared effective class with no correlator data cannot be closed
    CorrelatorTable empty;
    empty.ring = ring_of(kP1Ring);
    empty.bounds.poly_var.assign(1, false);
    empty.extra_ne.push_back({1});
    GwBounds target;
    target.max_n = 3;
    target.max_psi = 0;
    target.deg_cap = 1;
    CHECK_THROWS_AS(close_table(empty, target), Underdetermined);

    // without the declaration the quantum sector is empty and closure
    // degenerates to the classical stratum
    CorrelatorTable bare;
    bare.ring = ring_of(kP1Ring);
    bare.bounds.poly_var.assign(1, false);
    auto closed = close_table(bare, target);
    CHECK(closed.value(key({}, {{0, 0}, {1, 0}, {0, 0}})).is_one());
}

TEST_CASE("closure: inconsistent seed detected") {
    auto seed = point_seed();
    // <1,1,1,1.psi>_{0,4,0} must be 1 by the string equation; seed it as 2
    seed.insert(key({}, {{0, 0}, {0, 0}, {0, 0}, {0, 1}}), FieldElem(Rat(2)), {"seed", "bad"});
    GwBounds target;
    target.max_n = 5;
    target.max_psi = 2;
    target.deg_cap = 0;
    CHECK_THROWS_AS(close_table(seed, target), Inconsistent);
}

TEST_CASE("closed P1 table: small-degree values and descendants") {
    GwBounds target;
    target.max_n = 6;
    target.max_psi = 4;
    target.deg_cap = 3;
    auto closed = close_table(p1_seed(), target);

    CHECK(dimension_audit(closed).ok());
    CHECK(self_consistency_audit(closed).ok());

    // two- and one-point reconstructions
    CHECK(closed.value(key({1}, {{1, 0}, {1, 0}})).is_one());
    CHECK(closed.value(key({1}, {{1, 0}})).is_one());
    // <1 psi, .>_{0,1,1} = -2 (J-function z^-2 coefficient of P1 in degree 1)
    CHECK(closed.value(key({1}, {{0, 1}})).rational_value() == Rat(-2));
    // degree 2: <1 psi^3>_{0,1,2} = -1/4... verify against the known J-series
    // J_d-coefficient identities: <h psi^2>_{0,1,2} = 3/4? do not freeze
    // unchecked numbers; instead cross-check the divisor equation chains
    CHECK(reduce_divisor(closed, key({2}, {{1, 0}, {1, 2}}), 1) ==
          closed.value(key({2}, {{1, 2}})) * FieldElem(Rat(2)) +
              FieldElem::zero(closed.ring->cfg));
}

TEST_CASE("twist phases") {
    std::istringstream rin(R"(
ring P1z
dimc 1
consts w:root2
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
)");
    auto ring = load_ring(rin);
    std::istringstream gin(R"(
gw P1z
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1
end
)");
    auto t = ingest(gin, ring);

    // x = 0: identical
    auto t0 = twist(t, {Rat(0)});
    CHECK(t0.data == t.data);
    // x = 1/2: value picks up (-1)^(d) = -1
    auto th = twist(t, {rat_of(1, 2)});
    CHECK(th.value(key({1}, {{1, 0}, {1, 0}, {1, 0}})) == FieldElem(ring->cfg, Rat(-1)));
    // twist then untwist is the identity
    auto back = twist(th, {rat_of(-1, 2)});
    CHECK(back.data == t.data);
    // denominator must divide the cyclotomic order
    CHECK_THROWS_AS(twist(t, {rat_of(1, 3)}), GwError);
}

TEST_CASE("close_table is idempotent") {
    GwBounds target;
    target.max_n = 5;
    target.max_psi = 2;
    target.deg_cap = 2;
    auto once = close_table(p1_seed(), target);
    auto twice = close_table(once, target);
    CHECK(once.data == twice.data);
}

TEST_CASE("higher-genus records: stored, twisted, never reduced") {
    std::istringstream rin(R"(
ring P1z2
dimc 1
consts w:root2
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
)");
    auto ring = load_ring(rin);
    std::istringstream gin(R"(
gw P1z2
bounds n=3 psi=0 genus=1 deg=1
inv g=0 d=1 ins=(1:0)(1:0)(1:0) val=1
inv g=1 d=1 ins=(1:0) val=1/12
end
)");
    auto t = ingest(gin, ring);
    CorrKey g1;
    g1.genus = 1;
    g1.degree = {1};
    g1.ins = {{1, 0}};
    CHECK(t.value(g1) == FieldElem(ring->cfg, rat_of(1, 12)));

    // closure passes the record through untouched
    GwBounds target;
    target.max_n = 3;
    target.max_psi = 0;
    target.deg_cap = 1;
    target.max_genus = 1;
    auto closed = close_table(t, target);
    CHECK(closed.value(g1) == FieldElem(ring->cfg, rat_of(1, 12)));
    CHECK(closed.prov.at(g1).rule == "seed");

    // the twist applies to every genus
    auto tw = twist(closed, {rat_of(1, 2)});
    CHECK(tw.value(g1) == FieldElem(ring->cfg, rat_of(-1, 12)));

    // reductions refuse nonzero genus
    CHECK_THROWS_AS(reduce_dilaton(t, g1), GwError);
}
