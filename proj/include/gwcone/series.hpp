#pragma once

#include "gwcone/field.hpp"
#include "gwcone/ring.hpp"

#include <climits>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace gwcone {

struct SeriesError : std::runtime_error {
    explicit SeriesError(const std::string& what) : std::runtime_error(what) {}
};

/// Variable space of a truncated series: the ring supplies the Novikov
/// variables (rational exponents with common denominator m) and the basis
/// slot; coordinate variables are declared per space.
struct VarSpace {
    RingPtr ring;
    std::vector<std::string> coord_names;

    int novikov_count() const { return (int)ring->novikov.size(); }
    int denom() const { return ring->novikov_denom; }
    int coord_count() const { return (int)coord_names.size(); }
    bool same_as(const VarSpace& o) const {
        return ring == o.ring && coord_names == o.coord_names;
    }
};

using VarSpacePtr = std::shared_ptr<const VarSpace>;

VarSpacePtr make_space(RingPtr ring, std::vector<std::string> coord_names = {});
/// Coordinate names t0..tN matching the ring basis.
VarSpacePtr coord_space(const RingPtr& ring);

constexpr long kNovExact = LONG_MAX;
constexpr int kCoordExact = INT_MAX;
constexpr int kZLoExact = INT_MIN / 4;
constexpr int kZHiExact = INT_MAX / 4;

/// Truncation guarantee travelling with every series. Within the stated
/// bounds all omitted terms are真 zero; beyond them nothing is claimed.
/// nov_cap counts Novikov numerators (units of 1/m); nov_poly_bound[i] >= 0
/// declares the series complete in Novikov variable i with exponent-numerator
/// bound, which is what licenses the Q_i -> 1 specialization.
struct OrderSpec {
    long nov_cap = kNovExact;
    int coord_cap = kCoordExact;
    int z_lo = kZLoExact;
    int z_hi = kZHiExact;
    std::vector<int> nov_poly_bound;  // per Novikov variable; -1 = truncated

    static OrderSpec exact(int novikov_count) {
        OrderSpec o;
        o.nov_poly_bound.assign(novikov_count, -1);
        return o;
    }
    OrderSpec meet(const OrderSpec& o) const;  // componentwise weaker guarantee
};

/// Key of one stored coefficient: Novikov exponent numerators, coordinate
/// exponents, z exponent, and basis component (-1 for scalar series).
struct SKey {
    std::vector<int> nov;
    std::vector<int> coord;
    int z = 0;
    int comp = -1;

    long nov_total() const {
        long s = 0;
        for (int e : nov) s += e;
        return s;
    }
    int coord_total() const {
        int s = 0;
        for (int e : coord) s += e;
        return s;
    }
    bool operator<(const SKey& o) const {
        if (nov != o.nov) return nov < o.nov;
        if (coord != o.coord) return coord < o.coord;
        if (z != o.z) return z < o.z;
        return comp < o.comp;
    }
    bool operator==(const SKey& o) const {
        return nov == o.nov && coord == o.coord && z == o.z && comp == o.comp;
    }
};

/// Truncated formal series: sparse map of keys to exact coefficients plus the
/// truncation guarantee. Scalar-valued series use comp = -1 throughout;
/// H-valued series use basis components 0..N.
class Series {
  public:
    Series() = default;
    Series(VarSpacePtr space, OrderSpec order)
        : space_(std::move(space)), order_(std::move(order)) {}

    static Series zero(const VarSpacePtr& sp, const OrderSpec& o) { return Series(sp, o); }
    static Series scalar(const VarSpacePtr& sp, const OrderSpec& o, const FieldElem& c);
    /// z^k * phi_comp (comp = -1 for plain z^k).
    static Series monom(const VarSpacePtr& sp, const OrderSpec& o, int z, int comp,
                        const FieldElem& c);
    static Series coord_var(const VarSpacePtr& sp, const OrderSpec& o, int var);
    static Series novikov_var(const VarSpacePtr& sp, const OrderSpec& o, int var);

    const VarSpacePtr& space() const { return space_; }
    const OrderSpec& order() const { return order_; }
    OrderSpec& order_mutable() { return order_; }
    const std::map<SKey, FieldElem>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_scalar_valued() const;

    FieldElem coeff(const SKey& k) const;
    void add_term(const SKey& k, const FieldElem& c);  // drops out-of-order keys

    Series operator+(const Series& o) const;
    Series operator-(const Series& o) const;
    Series operator-() const;
    Series operator*(const Series& o) const;  // scalar*scalar or scalar*vector
    Series scaled(const FieldElem& c) const;
    bool operator==(const Series& o) const;

    /// Pointwise pairing of two H-valued series via the ring pairing.
    Series paired_with(const Series& o) const;
    /// Substitute z -> -z (flips sign of odd-z coefficients).
    Series z_negated() const;
    Series z_shifted(int k) const;  // multiply by z^k
    /// Coefficient of z^k as a series with z-support {0}.
    Series z_coefficient(int k) const;
    /// Component comp as a scalar series.
    Series component(int comp) const;
    /// Scalar series sent to component comp of an H-valued series.
    Series into_component(int comp) const;

    Series truncated(const OrderSpec& o) const;
    Series coord_derivative(int var) const;
    /// Scale each term by a function of its Novikov exponents (grading ops).
    Series nov_weighted(const std::function<Rat(const std::vector<int>&)>& weight) const;

    struct Binding {
        // exactly one of value / series is used
        std::optional<FieldElem> value;
        std::shared_ptr<const Series> series;
    };
    static Binding bind_value(FieldElem v) { return Binding{std::move(v), nullptr}; }
    static Binding bind_series(Series s);
    /// Substitute Novikov or coordinate variables. Novikov variables may only
    /// be bound to constants; binding to 1 requires the series to be declared
    /// polynomial (terminating) in that variable.
    Series substituted(const std::map<std::string, Binding>& bindings) const;

    /// e^{sign * rho / z} applied to an H-valued series; rho is a coefficient
    /// vector of scalar series supported on degree-2 basis indices.
    Series exp_z_factor(const std::vector<Series>& rho, int sign) const;

    std::string str() const;

  private:
    VarSpacePtr space_;
    OrderSpec order_;
    std::map<SKey, FieldElem> terms_;
};

/// exp of a scalar series with no constant term (truncated; terminates by
/// the order caps).
Series exp_series(const Series& a);

/// Apply a constant linear map to the basis components of an H-valued series:
/// out_i = sum_j m(i,j) v_j.
Series apply_linear(const FMatrix& m, const Series& v);

/// First key where two series disagree inside both guarantees, if any.
std::optional<SKey> first_mismatch(const Series& a, const Series& b);
bool key_within(const SKey& k, const OrderSpec& o);
std::string key_str(const SKey& k, const VarSpace& sp);

}  // namespace gwcone
