#include "gwcone/series.hpp"

#include <algorithm>
#include <climits>
#include <sstream>

namespace gwcone {

VarSpacePtr make_space(RingPtr ring, std::vector<std::string> coord_names) {
    auto sp = std::make_shared<VarSpace>();
    sp->ring = std::move(ring);
    sp->coord_names = std::move(coord_names);
    return sp;
}

VarSpacePtr coord_space(const RingPtr& ring) {
    std::vector<std::string> names;
    for (int i = 0; i < ring->size(); ++i) names.push_back("t" + std::to_string(i));
    return make_space(ring, std::move(names));
}

namespace {

constexpr long kMinusInf = LONG_MIN / 4;
constexpr long kPlusInf = LONG_MAX / 4;

long sup_possible_z(const Series& s) {
    long m = kMinusInf;
    for (const auto& [k, c] : s.terms()) m = std::max(m, (long)k.z);
    if (s.order().z_lo != kZLoExact) m = std::max(m, (long)s.order().z_lo - 1);
    return m;
}

long min_possible_nov(const Series& s) {
    long m = kPlusInf;
    for (const auto& [k, c] : s.terms()) m = std::min(m, k.nov_total());
    if (s.order().nov_cap != kNovExact) m = std::min(m, s.order().nov_cap + 1);
    return m;
}

long min_possible_coord(const Series& s) {
    long m = kPlusInf;
    for (const auto& [k, c] : s.terms()) m = std::min(m, (long)k.coord_total());
    if (s.order().coord_cap != kCoordExact) m = std::min(m, (long)s.order().coord_cap + 1);
    return m;
}

OrderSpec mul_order(const Series& a, const Series& b) {
    OrderSpec o;
    const OrderSpec& oa = a.order();
    const OrderSpec& ob = b.order();

    long za = sup_possible_z(a), zb = sup_possible_z(b);
    long lo = kMinusInf;
    if (oa.z_lo != kZLoExact && zb > kMinusInf) lo = std::max(lo, (long)oa.z_lo + zb);
    if (ob.z_lo != kZLoExact && za > kMinusInf) lo = std::max(lo, (long)ob.z_lo + za);
    o.z_lo = lo <= kMinusInf ? kZLoExact : (int)lo;
    long hi = (za <= kMinusInf || zb <= kMinusInf) ? kMinusInf : za + zb;
    o.z_hi = hi <= kMinusInf ? kZLoExact : (int)std::min<long>(hi, kZHiExact);
    if (o.z_hi < o.z_lo && o.z_lo != kZLoExact) o.z_hi = o.z_lo - 1;  // empty window

    long na = min_possible_nov(a), nb = min_possible_nov(b);
    long ncap = kNovExact;
    if (oa.nov_cap != kNovExact) ncap = std::min(ncap, nb >= kPlusInf ? kNovExact : oa.nov_cap + nb);
    if (ob.nov_cap != kNovExact) ncap = std::min(ncap, na >= kPlusInf ? kNovExact : ob.nov_cap + na);
    o.nov_cap = ncap;

    long ca = min_possible_coord(a), cb = min_possible_coord(b);
    long ccap = kCoordExact;
    if (oa.coord_cap != kCoordExact)
        ccap = std::min(ccap, cb >= kPlusInf ? (long)kCoordExact : oa.coord_cap + cb);
    if (ob.coord_cap != kCoordExact)
        ccap = std::min(ccap, ca >= kPlusInf ? (long)kCoordExact : ob.coord_cap + ca);
    o.coord_cap = (int)std::min<long>(ccap, kCoordExact);

    size_t nv = std::max(oa.nov_poly_bound.size(), ob.nov_poly_bound.size());
    o.nov_poly_bound.assign(nv, -1);
    for (size_t i = 0; i < nv; ++i) {
        int ba = i < oa.nov_poly_bound.size() ? oa.nov_poly_bound[i] : -1;
        int bb = i < ob.nov_poly_bound.size() ? ob.nov_poly_bound[i] : -1;
        o.nov_poly_bound[i] = (ba >= 0 && bb >= 0) ? ba + bb : -1;
    }
    return o;
}

}  // namespace

OrderSpec OrderSpec::meet(const OrderSpec& o) const {
    OrderSpec r;
    r.nov_cap = std::min(nov_cap, o.nov_cap);
    r.coord_cap = std::min(coord_cap, o.coord_cap);
    r.z_lo = std::max(z_lo, o.z_lo);
    r.z_hi = std::max(z_hi, o.z_hi);  // true-zero-above bound of a sum
    size_t nv = std::max(nov_poly_bound.size(), o.nov_poly_bound.size());
    r.nov_poly_bound.assign(nv, -1);
    for (size_t i = 0; i < nv; ++i) {
        int ba = i < nov_poly_bound.size() ? nov_poly_bound[i] : -1;
        int bb = i < o.nov_poly_bound.size() ? o.nov_poly_bound[i] : -1;
        r.nov_poly_bound[i] = (ba >= 0 && bb >= 0) ? std::max(ba, bb) : -1;
    }
    return r;
}

Series Series::scalar(const VarSpacePtr& sp, const OrderSpec& o, const FieldElem& c) {
    Series s(sp, o);
    SKey k;
    k.nov.assign(sp->novikov_count(), 0);
    k.coord.assign(sp->coord_count(), 0);
    s.add_term(k, c);
    return s;
}

Series Series::monom(const VarSpacePtr& sp, const OrderSpec& o, int z, int comp,
                     const FieldElem& c) {
    Series s(sp, o);
    SKey k;
    k.nov.assign(sp->novikov_count(), 0);
    k.coord.assign(sp->coord_count(), 0);
    k.z = z;
    k.comp = comp;
    s.add_term(k, c);
    return s;
}

Series Series::coord_var(const VarSpacePtr& sp, const OrderSpec& o, int var) {
    Series s(sp, o);
    SKey k;
    k.nov.assign(sp->novikov_count(), 0);
    k.coord.assign(sp->coord_count(), 0);
    k.coord[var] = 1;
    s.add_term(k, FieldElem::one(sp->ring->cfg));
    return s;
}

Series Series::novikov_var(const VarSpacePtr& sp, const OrderSpec& o, int var) {
    Series s(sp, o);
    SKey k;
    k.nov.assign(sp->novikov_count(), 0);
    k.coord.assign(sp->coord_count(), 0);
    k.nov[var] = sp->denom();  // exponent 1 = m/m
    s.add_term(k, FieldElem::one(sp->ring->cfg));
    return s;
}

bool Series::is_scalar_valued() const {
    for (const auto& [k, c] : terms_)
        if (k.comp >= 0) return false;
    return true;
}

FieldElem Series::coeff(const SKey& k) const {
    auto it = terms_.find(k);
    if (it == terms_.end()) return FieldElem::zero(space_->ring->cfg);
    return it->second;
}

void Series::add_term(const SKey& k, const FieldElem& c) {
    if (c.is_zero()) return;
    if (k.nov_total() > order_.nov_cap) return;
    if (k.coord_total() > order_.coord_cap) return;
    if (k.z < order_.z_lo) return;
    if (k.z > order_.z_hi)
        throw SeriesError("term above declared z-support (z^" + std::to_string(k.z) + ")");
    for (int e : k.nov)
        if (e < 0) throw SeriesError("negative Novikov exponent");
    auto it = terms_.find(k);
    if (it == terms_.end()) {
        terms_.emplace(k, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

Series Series::operator+(const Series& o) const {
    if (!space_->same_as(*o.space_)) throw SeriesError("variable-space mismatch in add");
    Series r(space_, order_.meet(o.order_));
    for (const auto& [k, c] : terms_) r.add_term(k, c);
    for (const auto& [k, c] : o.terms_) r.add_term(k, c);
    return r;
}

Series Series::operator-() const {
    Series r(space_, order_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, -c);
    return r;
}

Series Series::operator-(const Series& o) const { return *this + (-o); }

Series Series::operator*(const Series& o) const {
    if (!space_->same_as(*o.space_)) throw SeriesError("variable-space mismatch in mul");
    bool sa = is_scalar_valued(), sb = o.is_scalar_valued();
    if (!sa && !sb) throw SeriesError("product of two H-valued series is undefined");
    Series r(space_, mul_order(*this, o));
    for (const auto& [ka, ca] : terms_) {
        for (const auto& [kb, cb] : o.terms_) {
            SKey k;
            k.nov.resize(ka.nov.size());
            for (size_t i = 0; i < ka.nov.size(); ++i) k.nov[i] = ka.nov[i] + kb.nov[i];
            k.coord.resize(ka.coord.size());
            for (size_t i = 0; i < ka.coord.size(); ++i) k.coord[i] = ka.coord[i] + kb.coord[i];
            k.z = ka.z + kb.z;
            k.comp = std::max(ka.comp, kb.comp);
            r.add_term(k, ca * cb);
        }
    }
    return r;
}

Series Series::scaled(const FieldElem& c) const {
    Series r(space_, order_);
    if (c.is_zero()) return r;
    for (const auto& [k, t] : terms_) {
        FieldElem v = t * c;
        if (!v.is_zero()) r.terms_.emplace(k, v);
    }
    return r;
}

bool Series::operator==(const Series& o) const { return terms_ == o.terms_; }

Series Series::paired_with(const Series& o) const {
    if (!space_->same_as(*o.space_)) throw SeriesError("variable-space mismatch in pairing");
    const Ring& ring = *space_->ring;
    Series r(space_, mul_order(*this, o));
    for (const auto& [ka, ca] : terms_) {
        if (ka.comp < 0) throw SeriesError("pairing needs H-valued series");
        for (const auto& [kb, cb] : o.terms_) {
            if (kb.comp < 0) throw SeriesError("pairing needs H-valued series");
            const FieldElem& g = ring.pairing.at(ka.comp, kb.comp);
            if (g.is_zero()) continue;
            SKey k;
            k.nov.resize(ka.nov.size());
            for (size_t i = 0; i < ka.nov.size(); ++i) k.nov[i] = ka.nov[i] + kb.nov[i];
            k.coord.resize(ka.coord.size());
            for (size_t i = 0; i < ka.coord.size(); ++i) k.coord[i] = ka.coord[i] + kb.coord[i];
            k.z = ka.z + kb.z;
            k.comp = -1;
            r.add_term(k, ca * cb * g);
        }
    }
    return r;
}

Series Series::z_negated() const {
    Series r(space_, order_);
    for (const auto& [k, c] : terms_) r.terms_.emplace(k, (k.z % 2 != 0) ? -c : c);
    return r;
}

Series Series::z_shifted(int s) const {
    OrderSpec o = order_;
    if (o.z_lo != kZLoExact) o.z_lo += s;
    if (o.z_hi != kZHiExact && o.z_hi != kZLoExact) o.z_hi += s;
    Series r(space_, o);
    for (const auto& [k, c] : terms_) {
        SKey nk = k;
        nk.z += s;
        r.terms_.emplace(nk, c);
    }
    return r;
}

Series Series::z_coefficient(int z) const {
    OrderSpec o = order_;
    o.z_lo = kZLoExact;
    o.z_hi = kZHiExact;
    Series r(space_, o);
    if (z < order_.z_lo)
        throw SeriesError("z-coefficient outside guaranteed window: z^" + std::to_string(z));
    for (const auto& [k, c] : terms_) {
        if (k.z != z) continue;
        SKey nk = k;
        nk.z = 0;
        r.terms_.emplace(nk, c);
    }
    return r;
}

Series Series::component(int comp) const {
    Series r(space_, order_);
    for (const auto& [k, c] : terms_) {
        if (k.comp != comp) continue;
        SKey nk = k;
        nk.comp = -1;
        r.terms_.emplace(nk, c);
    }
    return r;
}

Series Series::into_component(int comp) const {
    Series r(space_, order_);
    for (const auto& [k, c] : terms_) {
        if (k.comp >= 0) throw SeriesError("into_component on H-valued series");
        SKey nk = k;
        nk.comp = comp;
        r.terms_.emplace(nk, c);
    }
    return r;
}

Series Series::truncated(const OrderSpec& o) const {
    OrderSpec n;
    n.nov_cap = std::min(order_.nov_cap, o.nov_cap);
    n.coord_cap = std::min(order_.coord_cap, o.coord_cap);
    n.z_lo = std::max(order_.z_lo, o.z_lo);
    n.z_hi = std::min(order_.z_hi, o.z_hi);
    n.nov_poly_bound = order_.nov_poly_bound;
    Series r(space_, n);
    for (const auto& [k, c] : terms_) {
        if (k.z > n.z_hi) throw SeriesError("cannot truncate true z-support");
        if (k.nov_total() > n.nov_cap || k.coord_total() > n.coord_cap || k.z < n.z_lo) continue;
        r.terms_.emplace(k, c);
    }
    return r;
}

Series Series::coord_derivative(int var) const {
    OrderSpec o = order_;
    if (o.coord_cap != kCoordExact) o.coord_cap -= 1;
    Series r(space_, o);
    for (const auto& [k, c] : terms_) {
        if (k.coord[var] == 0) continue;
        SKey nk = k;
        nk.coord[var] -= 1;
        r.add_term(nk, Rat(k.coord[var]) * c);
    }
    return r;
}

Series Series::nov_weighted(const std::function<Rat(const std::vector<int>&)>& weight) const {
    Series r(space_, order_);
    for (const auto& [k, c] : terms_) {
        Rat w = weight(k.nov);
        if (w == 0) continue;
        r.terms_.emplace(k, w * c);
    }
    return r;
}

Series::Binding Series::bind_series(Series s) {
    return Binding{std::nullopt, std::make_shared<const Series>(std::move(s))};
}

Series Series::substituted(const std::map<std::string, Binding>& bindings) const {
    Series cur = *this;
    const Ring& ring = *space_->ring;
    for (const auto& [name, bind] : bindings) {
        // locate the variable
        int nov_idx = -1, coord_idx = -1;
        for (int i = 0; i < (int)ring.novikov.size(); ++i)
            if (ring.novikov[i] == name) nov_idx = i;
        for (int i = 0; i < space_->coord_count(); ++i)
            if (space_->coord_names[i] == name) coord_idx = i;
        if (nov_idx < 0 && coord_idx < 0) throw SeriesError("unknown variable: " + name);

        if (nov_idx >= 0) {
            if (!bind.value) throw SeriesError("Novikov variables bind to constants only");
            const FieldElem& v = *bind.value;
            OrderSpec o = cur.order_;
            if (!v.is_zero()) {
                int bound = nov_idx < (int)o.nov_poly_bound.size() ? o.nov_poly_bound[nov_idx] : -1;
                if (bound < 0) {
                    int seen = 0;
                    for (const auto& [k, c] : cur.terms_) seen = std::max(seen, k.nov[nov_idx]);
                    throw SeriesError("non-terminating specialization in " + name +
                                      " (declared unbounded; max exponent seen " +
                                      std::to_string(seen) + "/" + std::to_string(space_->denom()) +
                                      ")");
                }
                if (o.nov_cap != kNovExact) o.nov_cap -= bound;
            }
            if (nov_idx < (int)o.nov_poly_bound.size()) o.nov_poly_bound[nov_idx] = 0;
            Series next(space_, o);
            for (const auto& [k, c] : cur.terms_) {
                int e = k.nov[nov_idx];
                SKey nk = k;
                nk.nov[nov_idx] = 0;
                if (e == 0) {
                    next.add_term(nk, c);
                    continue;
                }
                if (v.is_zero()) continue;
                // exponent e is a numerator over denom m; a constant is only
                // substitutable when the power is exact: require v^(e/m) with
                // e divisible by m, or v a root of unity handled by caller
                if (e % space_->denom() != 0)
                    throw SeriesError("fractional power of substituted value for " + name);
                next.add_term(nk, c * v.pow(e / space_->denom()));
            }
            cur = std::move(next);
            continue;
        }

        // coordinate variable
        if (bind.value) {
            const FieldElem& v = *bind.value;
            Series next(space_, cur.order_);
            for (const auto& [k, c] : cur.terms_) {
                int e = k.coord[coord_idx];
                SKey nk = k;
                nk.coord[coord_idx] = 0;
                next.add_term(nk, e == 0 ? c : c * v.pow(e));
            }
            cur = std::move(next);
        } else if (bind.series) {
            const Series& s = *bind.series;
            if (!s.is_scalar_valued()) throw SeriesError("coordinate binding must be scalar");
            // group by exponent of the variable
            int max_e = 0;
            for (const auto& [k, c] : cur.terms_) max_e = std::max(max_e, k.coord[coord_idx]);
            Series acc(space_, cur.order_);
            Series spow = Series::scalar(space_, OrderSpec::exact(space_->novikov_count()),
                                         FieldElem::one(ring.cfg));
            for (int e = 0; e <= max_e; ++e) {
                OrderSpec oe = cur.order_;
                if (oe.coord_cap != kCoordExact) oe.coord_cap -= e;
                Series slice(space_, oe);
                for (const auto& [k, c] : cur.terms_) {
                    if (k.coord[coord_idx] != e) continue;
                    SKey nk = k;
                    nk.coord[coord_idx] = 0;
                    slice.terms_.emplace(nk, c);
                }
                if (!slice.is_zero()) acc = acc + slice * spow;
                if (e < max_e) spow = spow * s;
            }
            cur = std::move(acc);
        } else {
            throw SeriesError("empty binding for " + name);
        }
    }
    return cur;
}

Series Series::exp_z_factor(const std::vector<Series>& rho, int sign) const {
    const Ring& ring = *space_->ring;
    if ((int)rho.size() != ring.size()) throw SeriesError("rho length must match basis");
    for (int i = 0; i < ring.size(); ++i)
        if (!rho[i].is_zero() && ring.degree(i) != 2 && ring.degree(i) != 0)
            throw SeriesError("exp_z_factor needs rho supported in degrees 0 and 2");
    if (order_.z_hi < order_.z_lo) throw SeriesError("window overflow: empty z-window");

    auto cup_rho = [&](const Series& v) {
        Series out(space_, v.order());
        for (int i = 0; i < ring.size(); ++i) {
            if (rho[i].is_zero()) continue;
            // cup by basis element i acting on components
            Series moved(space_, v.order());
            for (const auto& [k, c] : v.terms()) {
                if (k.comp < 0) throw SeriesError("exp_z_factor needs an H-valued series");
                const auto& row = ring.classical_product(i, k.comp);
                for (int t = 0; t < ring.size(); ++t) {
                    if (row[t].is_zero()) continue;
                    SKey nk = k;
                    nk.comp = t;
                    moved.add_term(nk, c * row[t]);
                }
            }
            out = out + rho[i] * moved;
        }
        return out;
    };

    Series result = *this;
    Series term = *this;  // running iterate sign^k (rho cup)^k v z^{-k}, unscaled
    long span = (order_.z_lo == kZLoExact || order_.z_hi == kZHiExact)
                    ? 64
                    : (long)order_.z_hi - order_.z_lo + 1;
    long guard = span + (order_.coord_cap == kCoordExact ? 8 : order_.coord_cap) + ring.dim_c + 8;
    Rat factorial = 1;
    for (long k = 1;; ++k) {
        term = cup_rho(term).z_shifted(-1);
        if (sign < 0) term = -term;
        if (term.is_zero()) break;
        if (k > guard) throw SeriesError("window overflow in exp_z_factor");
        factorial *= k;
        result = result + term.scaled(FieldElem(Rat(1) / factorial));
    }
    return result;
}

Series exp_series(const Series& a) {
    if (!a.is_scalar_valued()) throw SeriesError("exp of non-scalar series");
    for (const auto& [k, c] : a.terms())
        if (k.nov_total() == 0 && k.coord_total() == 0 && k.z == 0)
            throw SeriesError("exp needs zero constant term");
    Series one = Series::scalar(a.space(), a.order(), FieldElem::one(a.space()->ring->cfg));
    Series result = one;
    Series power = one;
    Rat factorial = 1;
    for (long k = 1;; ++k) {
        power = (power * a).truncated(a.order());
        if (power.is_zero()) break;
        factorial *= k;
        result = result + power.scaled(FieldElem(Rat(1) / factorial));
        if (k > 10000) throw SeriesError("exp_series does not terminate at this order");
    }
    return result;
}

Series apply_linear(const FMatrix& m, const Series& v) {
    Series out(v.space(), v.order());
    for (const auto& [k, c] : v.terms()) {
        if (k.comp < 0) throw SeriesError("apply_linear needs an H-valued series");
        for (int i = 0; i < m.rows(); ++i) {
            if (m.at(i, k.comp).is_zero()) continue;
            SKey nk = k;
            nk.comp = i;
            out.add_term(nk, c * m.at(i, k.comp));
        }
    }
    return out;
}

bool key_within(const SKey& k, const OrderSpec& o) {
    return k.nov_total() <= o.nov_cap && k.coord_total() <= o.coord_cap && k.z >= o.z_lo &&
           k.z <= o.z_hi;
}

std::optional<SKey> first_mismatch(const Series& a, const Series& b) {
    for (const auto& [k, c] : a.terms()) {
        if (!key_within(k, a.order()) || !key_within(k, b.order())) continue;
        if (!(b.coeff(k) == c)) return k;
    }
    for (const auto& [k, c] : b.terms()) {
        if (!key_within(k, a.order()) || !key_within(k, b.order())) continue;
        if (!(a.coeff(k) == c)) return k;
    }
    return std::nullopt;
}

std::string key_str(const SKey& k, const VarSpace& sp) {
    std::ostringstream os;
    bool any = false;
    for (size_t i = 0; i < k.nov.size(); ++i) {
        if (k.nov[i] == 0) continue;
        if (any) os << "*";
        any = true;
        os << sp.ring->novikov[i];
        if (k.nov[i] != sp.denom()) {
            if (k.nov[i] % sp.denom() == 0)
                os << "^" << k.nov[i] / sp.denom();
            else
                os << "^(" << k.nov[i] << "/" << sp.denom() << ")";
        }
    }
    for (size_t i = 0; i < k.coord.size(); ++i) {
        if (k.coord[i] == 0) continue;
        if (any) os << "*";
        any = true;
        os << sp.coord_names[i];
        if (k.coord[i] != 1) os << "^" << k.coord[i];
    }
    if (k.z != 0) {
        if (any) os << "*";
        any = true;
        os << "z^" << k.z;
    }
    if (k.comp >= 0) {
        if (any) os << "*";
        any = true;
        os << "[" << sp.ring->basis[k.comp].name << "]";
    }
    if (!any) os << "1";
    return os.str();
}

std::string Series::str() const {
    if (terms_.empty()) return "0";
    const Ring& ring = *space_->ring;
    std::ostringstream os;
    bool first = true;
    for (const auto& [k, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        std::string cs = c.str();
        if (cs.find(' ') != std::string::npos) cs = "(" + cs + ")";
        os << cs;
        for (size_t i = 0; i < k.nov.size(); ++i) {
            if (k.nov[i] == 0) continue;
            os << "*" << ring.novikov[i];
            int num = k.nov[i], den = space_->denom();
            if (num % den == 0) {
                if (num / den != 1) os << "^" << num / den;
            } else {
                os << "^(" << num << "/" << den << ")";
            }
        }
        for (size_t i = 0; i < k.coord.size(); ++i) {
            if (k.coord[i] == 0) continue;
            os << "*" << space_->coord_names[i];
            if (k.coord[i] != 1) os << "^" << k.coord[i];
        }
        if (k.z != 0) os << "*z^" << k.z;
        if (k.comp >= 0) os << "*[" << ring.basis[k.comp].name << "]";
    }
    return os.str();
}

}  // namespace gwcone
