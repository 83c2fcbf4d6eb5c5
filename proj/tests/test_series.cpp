#include "doctest.h"

#include "gwcone/series.hpp"

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

FieldElem one(const RingPtr& r) { return FieldElem::one(r->cfg); }

}  // namespace

TEST_CASE("arithmetic respects truncation orders") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {"t0", "t1"});
    OrderSpec o = OrderSpec::exact(1);
    o.nov_cap = 2;

    Series oneS = Series::scalar(sp, o, one(ring));
    Series q = Series::novikov_var(sp, o, 0);
    // (1+Q)(1-Q) at novikov_max 2 -> 1 - Q^2
    Series prod = (oneS + q) * (oneS - q);
    Series expect = oneS - q * q;
    CHECK(prod == expect);
    CHECK(prod.order().nov_cap == 2);

    // exp(t1) exp(-t1) at coord_max 4 -> 1
    OrderSpec oc = OrderSpec::exact(1);
    oc.coord_cap = 4;
    Series t1 = Series::coord_var(sp, oc, 1);
    Series e1 = exp_series(t1), e2 = exp_series(-t1);
    Series p = e1 * e2;
    CHECK(p == Series::scalar(sp, oc, one(ring)));
}

TEST_CASE("z-window bookkeeping under multiplication") {
    auto ring = ring_of(kPtRing);
    auto sp = make_space(ring);
    OrderSpec o = OrderSpec::exact(0);
    o.z_lo = -3;
    o.z_hi = 3;
    Series zp = Series::monom(sp, o, 1, -1, one(ring));
    Series zm = Series::monom(sp, o, -1, -1, one(ring));
    Series p = zp * zm;
    SKey k0;
    k0.nov = {};
    k0.coord = {};
    k0.z = 0;
    CHECK(p.coeff(k0).is_one());
    // window shrinks by one on the truncated side
    CHECK(p.order().z_lo == -2);
    CHECK(p.order().z_hi >= 0);
}

TEST_CASE("higher-order product truncates to the lower-order product") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {"t0", "t1"});
    OrderSpec lo = OrderSpec::exact(1);
    lo.nov_cap = 2;
    lo.coord_cap = 2;
    OrderSpec hi = OrderSpec::exact(1);
    hi.nov_cap = 5;
    hi.coord_cap = 5;

    auto mk = [&](const OrderSpec& o) {
        Series s = Series::scalar(sp, o, one(ring));
        s = s + Series::novikov_var(sp, o, 0) + Series::coord_var(sp, o, 0) +
            Series::coord_var(sp, o, 1) * Series::novikov_var(sp, o, 0);
        return s;
    };
    Series a_hi = mk(hi) * mk(hi), a_lo = mk(lo) * mk(lo);
    CHECK(a_hi.truncated(a_lo.order()) == a_lo);
}

TEST_CASE("substitution: Novikov specialization") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {});
    // series complete in Q1 up to exponent 2
    OrderSpec o = OrderSpec::exact(1);
    o.nov_poly_bound = {2};
    Series q = Series::novikov_var(sp, o, 0);
    Series f = q * q + q;  // Q^2 + Q

    // Q1 -> 1 gives 2
    auto subst = f.substituted({{"Q1", Series::bind_value(one(ring))}});
    CHECK(subst == Series::scalar(sp, subst.order(), FieldElem(ring->cfg, Rat(2))));

    // Q1 -> 0 kills everything
    auto zero = f.substituted({{"Q1", Series::bind_value(FieldElem::zero(ring->cfg))}});
    CHECK(zero.is_zero());

    // undeclared (truncated) variable cannot be specialized to 1
    OrderSpec bad = OrderSpec::exact(1);
    bad.nov_cap = 4;
    bad.nov_poly_bound = {-1};
    Series g = Series::novikov_var(sp, bad, 0);
    CHECK_THROWS_WITH_AS(g.substituted({{"Q1", Series::bind_value(one(ring))}}),
                         doctest::Contains("non-terminating"), SeriesError);
}

TEST_CASE("substitution: coordinate values and series") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {"t0", "t1"});
    OrderSpec o = OrderSpec::exact(1);
    o.coord_cap = 3;
    Series t0 = Series::coord_var(sp, o, 0);
    Series t1 = Series::coord_var(sp, o, 1);
    // t1 -> 0 in t0 + t0 t1 leaves t0
    Series f = t0 + t0 * t1;
    CHECK(f.substituted({{"t1", Series::bind_value(FieldElem::zero(ring->cfg))}}) == t0);
    // t1 -> t0 + t0^2 composes
    Series g = f.substituted({{"t1", Series::bind_series(t0 + t0 * t0)}});
    CHECK(g == t0 + t0 * (t0 + t0 * t0));
}

TEST_CASE("partial derivatives") {
    auto ring = ring_of(kPtRing);
    auto sp = make_space(ring, {"t0"});
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 5;
    Series t = Series::coord_var(sp, o, 0);
    Series f = t * t * t;  // t^3
    Series sixth = f.scaled(FieldElem(Rat(1) / 6));
    // d/dt (t^3/6) = t^2/2
    CHECK(sixth.coord_derivative(0) == (t * t).scaled(FieldElem(rat_of(1, 2))));
    // third derivative of t^3/6 is 1
    Series third = sixth.coord_derivative(0).coord_derivative(0).coord_derivative(0);
    CHECK(third == Series::scalar(sp, third.order(), one(ring)));
    // derivative of a t-free series vanishes
    CHECK(Series::scalar(sp, o, one(ring)).coord_derivative(0).is_zero());
}

TEST_CASE("mixed partials commute") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {"t0", "t1"});
    OrderSpec o = OrderSpec::exact(1);
    o.coord_cap = 4;
    Series t0 = Series::coord_var(sp, o, 0), t1 = Series::coord_var(sp, o, 1);
    Series f = t0 * t0 * t1 + t1 * t1 * t0 + t0 * t1;
    CHECK(f.coord_derivative(0).coord_derivative(1) ==
          f.coord_derivative(1).coord_derivative(0));
}

TEST_CASE("exp_z_factor on the point reproduces -z e^{-t/z}") {
    auto ring = ring_of(kPtRing);
    auto sp = make_space(ring, {"t0"});
    OrderSpec o = OrderSpec::exact(0);
    o.coord_cap = 3;
    o.z_lo = -3;
    o.z_hi = 1;
    // v = -z (H-valued, component 0)
    Series v = Series::monom(sp, o, 1, 0, -one(ring));
    Series t = Series::coord_var(sp, o, 0);
    std::vector<Series> rho{t};
    Series j = v.exp_z_factor(rho, -1);
    // -z e^{-t/z} = -z + t - t^2/(2z) + t^3/(6z^2) - ...
    Series expect = v;
    expect = expect + t.into_component(0);
    expect = expect + (t * t).scaled(FieldElem(rat_of(-1, 2))).into_component(0).z_shifted(-1);
    expect = expect + (t * t * t).scaled(FieldElem(rat_of(1, 6))).into_component(0).z_shifted(-2);
    CHECK(first_mismatch(j, expect) == std::nullopt);

    // rho = 0 leaves v unchanged
    std::vector<Series> rho0{Series::zero(sp, o)};
    CHECK(v.exp_z_factor(rho0, 1) == v);

    // round trip within the window
    Series back = j.exp_z_factor(rho, +1);
    CHECK(first_mismatch(back, v) == std::nullopt);
}

TEST_CASE("exp_z_factor nilpotency on P1: exactly two terms") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring, {"t0", "t1"});
    OrderSpec o = OrderSpec::exact(1);
    o.coord_cap = 4;
    o.z_lo = -4;
    o.z_hi = 1;
    // v = 1 (component 0); rho = t1 * h
    Series v = Series::monom(sp, o, 0, 0, one(ring));
    std::vector<Series> rho{Series::zero(sp, o), Series::coord_var(sp, o, 1)};
    Series e = v.exp_z_factor(rho, 1);
    // (h cup)^2 = 0, so e = 1 + t1 h / z: exactly two terms
    CHECK(e.terms().size() == 2);
    Series expect = v + Series::coord_var(sp, o, 1).into_component(1).z_shifted(-1);
    CHECK(e == expect);
}

TEST_CASE("pairing of H-valued series") {
    auto ring = ring_of(kP1Ring);
    auto sp = make_space(ring);
    OrderSpec o = OrderSpec::exact(1);
    o.z_lo = -3;
    o.z_hi = 2;
    Series a = Series::monom(sp, o, 1, 0, one(ring));   // z * 1
    Series b = Series::monom(sp, o, -2, 1, one(ring));  // z^-2 h
    Series p = a.paired_with(b);
    SKey k;
    k.nov = {0};
    k.coord = {};
    k.z = -1;
    CHECK(p.coeff(k).is_one());  // (1,h) = 1 at z^{-1}
}
