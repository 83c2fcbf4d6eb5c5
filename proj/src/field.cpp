#include "gwcone/field.hpp"

#include <algorithm>
#include <sstream>

namespace gwcone {

Rat rat_of(long num, long den) {
    Rat q(num, den);
    q.canonicalize();
    return q;
}

Rat parse_rational(const std::string& text) {
    auto slash = text.find('/');
    try {
        if (slash == std::string::npos) {
            Rat q(text);
            q.canonicalize();
            return q;
        }
        Rat q(text.substr(0, slash) + "/" + text.substr(slash + 1));
        q.canonicalize();
        return q;
    } catch (const std::invalid_argument&) {
        throw FieldError("bad rational literal: " + text);
    }
}

std::string rat_str(const Rat& q) { return q.get_str(); }

// ---------------------------------------------------------------- univariate
// helpers over Q, used only to build the cyclotomic polynomial

namespace {

using UPoly = std::vector<Rat>;  // low-to-high, no trailing zeros

void utrim(UPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

UPoly udiv_exact(const UPoly& a, const UPoly& b) {
    UPoly rem = a, q;
    if (b.empty()) throw FieldError("division by zero polynomial");
    q.assign(a.size(), Rat(0));
    while (rem.size() >= b.size()) {
        Rat c = rem.back() / b.back();
        size_t shift = rem.size() - b.size();
        q[shift] = c;
        for (size_t i = 0; i < b.size(); ++i) rem[shift + i] -= c * b[i];
        utrim(rem);
        if (rem.empty()) break;
    }
    if (!rem.empty()) throw FieldError("non-exact polynomial division");
    utrim(q);
    return q;
}

UPoly cyclotomic(int n) {
    // Phi_1 = x - 1; Phi_n = (x^n - 1) / prod_{d|n, d<n} Phi_d
    UPoly p(n + 1, Rat(0));
    p[0] = -1;
    p[n] = 1;
    for (int d = 1; d < n; ++d) {
        if (n % d != 0) continue;
        p = udiv_exact(p, cyclotomic(d));
    }
    return p;
}

}  // namespace

// ---------------------------------------------------------------- FieldConfig

FieldConfig::FieldConfig(std::vector<ConstDecl> decls) : decls_(std::move(decls)) { init(); }

void FieldConfig::init() {
    root_order_ = 1;
    root_name_.clear();
    gen_names_.clear();
    bool have_root = false;
    for (const auto& d : decls_) {
        if (d.name.empty()) throw FieldError("constant with empty name");
        for (const auto& e : decls_)
            if (&d != &e && d.name == e.name) throw FieldError("duplicate constant: " + d.name);
        if (d.is_root()) {
            if (have_root) throw FieldError("at most one root-of-unity generator");
            have_root = true;
            root_order_ = d.root_order;
            root_name_ = d.name;
        } else {
            gen_names_.push_back(d.name);
        }
    }
    cyclo_ = cyclotomic(root_order_);
}

FieldConfigPtr FieldConfig::rationals() {
    static FieldConfigPtr q = std::make_shared<FieldConfig>();
    return q;
}

FieldConfigPtr FieldConfig::make(std::vector<ConstDecl> decls) {
    return std::make_shared<FieldConfig>(std::move(decls));
}

int FieldConfig::lookup(const std::string& name) const {
    for (int i = 0; i < (int)gen_names_.size(); ++i)
        if (gen_names_[i] == name) return i;
    if (!root_name_.empty() && name == root_name_) return gen_count();
    return -1;
}

bool FieldConfig::same_as(const FieldConfig& o) const {
    if (root_order_ != o.root_order_ || root_name_ != o.root_name_) return false;
    return gen_names_ == o.gen_names_;
}

bool FieldConfig::embeds_in(const FieldConfig& big) const {
    if (root_order_ > 1) {
        if (big.root_order_ != root_order_ || big.root_name_ != root_name_) return false;
    }
    for (const auto& g : gen_names_)
        if (big.lookup(g) < 0 || big.lookup(g) >= big.gen_count()) return false;
    return true;
}

FieldConfigPtr FieldConfig::merged(const FieldConfig& a, const FieldConfig& b) {
    std::vector<ConstDecl> decls = a.decls_;
    for (const auto& d : b.decls_) {
        bool found = false;
        for (const auto& e : decls) {
            if (e.name != d.name) continue;
            if (e.root_order != d.root_order)
                throw FieldError("conflicting declarations for constant " + d.name);
            found = true;
        }
        if (!found) {
            if (d.is_root())
                for (const auto& e : decls)
                    if (e.is_root())
                        throw FieldError("two distinct root-of-unity generators: " + e.name +
                                         ", " + d.name);
            decls.push_back(d);
        }
    }
    return make(std::move(decls));
}

// ---------------------------------------------------------------------- Cyclo

Cyclo::Cyclo(const FieldConfig* cfg, Rat r) : cfg_(cfg) {
    coef_.assign(cfg->cyclo_degree(), Rat(0));
    coef_[0] = std::move(r);
}

Cyclo Cyclo::root_pow(const FieldConfig* cfg, long k) {
    int n = cfg->root_order();
    long e = ((k % n) + n) % n;
    std::vector<Rat> raw(e + 1, Rat(0));
    raw[e] = 1;
    Cyclo c;
    c.cfg_ = cfg;
    c.reduce(raw);
    c.coef_ = std::move(raw);
    return c;
}

bool Cyclo::is_zero() const {
    for (const auto& c : coef_)
        if (c != 0) return false;
    return true;
}

bool Cyclo::is_rational() const {
    for (size_t i = 1; i < coef_.size(); ++i)
        if (coef_[i] != 0) return false;
    return true;
}

void Cyclo::reduce(std::vector<Rat>& raw) const {
    const auto& phi = cfg_->cyclo_poly();
    size_t deg = phi.size() - 1;
    while (raw.size() > deg) {
        Rat c = raw.back();
        size_t shift = raw.size() - 1 - deg;
        if (c != 0)
            for (size_t i = 0; i < phi.size(); ++i) raw[shift + i] -= c * phi[i];
        raw.pop_back();
    }
    raw.resize(deg, Rat(0));
}

Cyclo Cyclo::operator-() const {
    Cyclo r = *this;
    for (auto& c : r.coef_) c = -c;
    return r;
}

Cyclo Cyclo::operator+(const Cyclo& o) const {
    Cyclo r = *this;
    for (size_t i = 0; i < coef_.size(); ++i) r.coef_[i] += o.coef_[i];
    return r;
}

Cyclo Cyclo::operator-(const Cyclo& o) const { return *this + (-o); }

Cyclo Cyclo::operator*(const Cyclo& o) const {
    std::vector<Rat> raw(2 * coef_.size(), Rat(0));
    for (size_t i = 0; i < coef_.size(); ++i) {
        if (coef_[i] == 0) continue;
        for (size_t j = 0; j < o.coef_.size(); ++j) {
            if (o.coef_[j] == 0) continue;
            raw[i + j] += coef_[i] * o.coef_[j];
        }
    }
    Cyclo r;
    r.cfg_ = cfg_;
    r.reduce(raw);
    r.coef_ = std::move(raw);
    return r;
}

Cyclo Cyclo::inverse() const {
    if (is_zero()) throw FieldError("division by zero");
    // extended Euclid for gcd(f, Phi_N) = 1 in Q[x]
    UPoly r0 = cfg_->cyclo_poly();
    UPoly r1(coef_.begin(), coef_.end());
    utrim(r1);
    UPoly s0, s1{Rat(1)};  // s tracks the coefficient of f
    while (true) {
        // divide r0 by r1
        UPoly q(r0.size(), Rat(0)), rem = r0;
        while (rem.size() >= r1.size() && !rem.empty()) {
            Rat c = rem.back() / r1.back();
            size_t shift = rem.size() - r1.size();
            q[shift] += c;
            for (size_t i = 0; i < r1.size(); ++i) rem[shift + i] -= c * r1[i];
            utrim(rem);
        }
        utrim(q);
        // s2 = s0 - q * s1
        UPoly s2 = s0;
        s2.resize(std::max(s2.size(), q.size() + s1.size()), Rat(0));
        for (size_t i = 0; i < q.size(); ++i)
            for (size_t j = 0; j < s1.size(); ++j) s2[i + j] -= q[i] * s1[j];
        utrim(s2);
        if (rem.empty()) {
            // r1 is the (constant) gcd; inverse = s1 / r1
            if (r1.size() != 1)
                throw FieldError("cyclotomic polynomial not coprime to element");
            Cyclo inv;
            inv.cfg_ = cfg_;
            std::vector<Rat> raw(s1.begin(), s1.end());
            inv.reduce(raw);
            inv.coef_ = std::move(raw);
            Rat scale = Rat(1) / r1[0];
            for (auto& c : inv.coef_) c *= scale;
            return inv;
        }
        r0 = std::move(r1);
        r1 = std::move(rem);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
}

std::string Cyclo::str(const std::string& root_name) const {
    std::ostringstream os;
    bool first = true;
    for (size_t i = 0; i < coef_.size(); ++i) {
        if (coef_[i] == 0) continue;
        if (!first) os << (coef_[i] > 0 ? " + " : " - ");
        Rat a = first ? coef_[i] : Rat(abs(coef_[i]));
        if (i == 0)
            os << a.get_str();
        else {
            if (a != 1) os << a.get_str() << "*";
            os << root_name;
            if (i > 1) os << "^" << i;
        }
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

// ---------------------------------------------------------------------- MPoly

MPoly::MPoly(const FieldConfig* cfg, const Cyclo& c) : cfg_(cfg) {
    if (!c.is_zero()) terms_.emplace(Mono(cfg->gen_count(), 0), c);
}

MPoly MPoly::constant(const FieldConfig* cfg, Rat r) { return MPoly(cfg, Cyclo(cfg, std::move(r))); }

MPoly MPoly::generator(const FieldConfig* cfg, int idx) {
    MPoly p(cfg);
    Mono m(cfg->gen_count(), 0);
    m[idx] = 1;
    p.terms_.emplace(std::move(m), Cyclo::one(cfg));
    return p;
}

bool MPoly::is_constant() const {
    if (terms_.empty()) return true;
    if (terms_.size() != 1) return false;
    for (int e : terms_.begin()->first)
        if (e != 0) return false;
    return true;
}

Cyclo MPoly::constant_value() const {
    if (terms_.empty()) return Cyclo::zero(cfg_);
    return terms_.begin()->second;
}

void MPoly::add_term(const Mono& m, const Cyclo& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
    } else {
        it->second = it->second + c;
        if (it->second.is_zero()) terms_.erase(it);
    }
}

MPoly MPoly::operator-() const {
    MPoly r(cfg_);
    for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
    return r;
}

MPoly MPoly::operator+(const MPoly& o) const {
    MPoly r = *this;
    for (const auto& [m, c] : o.terms_) r.add_term(m, c);
    return r;
}

MPoly MPoly::operator-(const MPoly& o) const { return *this + (-o); }

MPoly MPoly::operator*(const MPoly& o) const {
    MPoly r(cfg_);
    for (const auto& [ma, ca] : terms_) {
        for (const auto& [mb, cb] : o.terms_) {
            Mono m = ma;
            for (size_t i = 0; i < m.size(); ++i) m[i] += mb[i];
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

MPoly MPoly::scaled(const Cyclo& c) const {
    MPoly r(cfg_);
    if (c.is_zero()) return r;
    for (const auto& [m, t] : terms_) r.terms_.emplace(m, t * c);
    return r;
}

const MPoly::Mono& MPoly::lead_mono() const {
    if (terms_.empty()) throw FieldError("lead term of zero polynomial");
    return terms_.rbegin()->first;
}

const Cyclo& MPoly::lead_coef() const {
    if (terms_.empty()) throw FieldError("lead term of zero polynomial");
    return terms_.rbegin()->second;
}

int MPoly::degree_in(int var) const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[var]);
    return d;
}

namespace {

// View of an MPoly as a univariate polynomial in variable `var` with MPoly
// coefficients (in which `var` does not occur).
std::vector<MPoly> coeffs_in(const MPoly& p, int var, const FieldConfig* cfg) {
    std::vector<MPoly> out(p.degree_in(var) + 1, MPoly(cfg));
    for (const auto& [m, c] : p.terms()) {
        MPoly::Mono rest = m;
        int e = rest[var];
        rest[var] = 0;
        out[e].add_term(rest, c);
    }
    while (out.size() > 1 && out.back().is_zero()) out.pop_back();
    return out;
}

MPoly assemble_in(const std::vector<MPoly>& coeffs, int var, const FieldConfig* cfg) {
    MPoly p(cfg);
    for (size_t e = 0; e < coeffs.size(); ++e) {
        for (const auto& [m, c] : coeffs[e].terms()) {
            MPoly::Mono full = m;
            full[var] += (int)e;
            p.add_term(full, c);
        }
    }
    return p;
}

int top_var(const MPoly& p) {
    int v = -1;
    for (const auto& [m, c] : p.terms())
        for (int i = 0; i < (int)m.size(); ++i)
            if (m[i] > 0) v = std::max(v, i);
    return v;
}

// Divide out the common rational content across a list of polynomials; this
// keeps coefficient bit-lengths tame inside the pseudo-remainder sequence.
void strip_rational_content(std::vector<MPoly>& polys) {
    mpz_class g = 0, l = 1;
    for (const auto& p : polys)
        for (const auto& [m, c] : p.terms())
            for (const auto& q : c.coef()) {
                if (q == 0) continue;
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), q.get_num().get_mpz_t());
                mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), q.get_den().get_mpz_t());
            }
    if (g == 0) return;
    Rat content(g, l);
    content.canonicalize();
    if (content == 1) return;
    const FieldConfig* cfg = polys[0].cfg();
    Cyclo inv(cfg, Rat(1) / content);
    for (auto& p : polys) p = p.scaled(inv);
}

MPoly content_of(const std::vector<MPoly>& coeffs) {
    MPoly g = coeffs.empty() ? MPoly() : MPoly(coeffs[0].cfg());
    for (const auto& c : coeffs) g = MPoly::gcd(g, c);
    return g;
}

}  // namespace

MPoly MPoly::divide_exact(const MPoly& d) const {
    if (d.is_zero()) throw FieldError("division by zero polynomial");
    if (is_zero()) return MPoly(cfg_);
    if (d.is_constant()) return scaled(d.constant_value().inverse());
    MPoly rem = *this, quot(cfg_);
    const Mono& dl = d.lead_mono();
    Cyclo dinv = d.lead_coef().inverse();
    while (!rem.is_zero()) {
        const Mono& rl = rem.lead_mono();
        Mono q = rl;
        bool ok = true;
        for (size_t i = 0; i < q.size(); ++i) {
            q[i] -= dl[i];
            if (q[i] < 0) ok = false;
        }
        if (!ok) throw FieldError("non-exact polynomial division");
        Cyclo c = rem.lead_coef() * dinv;
        MPoly t(cfg_);
        t.terms_.emplace(q, c);
        quot = quot + t;
        rem = rem - t * d;
    }
    return quot;
}

MPoly MPoly::gcd(const MPoly& a, const MPoly& b) {
    const FieldConfig* cfg = a.cfg_ ? a.cfg_ : b.cfg_;
    if (!cfg) return MPoly();
    auto monic = [cfg](const MPoly& p) {
        if (p.is_zero()) return p;
        return p.scaled(p.lead_coef().inverse());
    };
    if (a.is_zero()) return monic(b);
    if (b.is_zero()) return monic(a);
    if (a.is_constant() || b.is_constant()) return MPoly::constant(cfg, 1);

    int var = std::max(top_var(a), top_var(b));
    auto ca = coeffs_in(a, var, cfg);
    auto cb = coeffs_in(b, var, cfg);
    MPoly cont_a = content_of(ca);
    MPoly cont_b = content_of(cb);
    MPoly cont_g = gcd(cont_a, cont_b);

    // primitive parts as univariate polynomials in `var`
    auto prim = [&](std::vector<MPoly> cs, const MPoly& cont) {
        for (auto& c : cs) c = c.divide_exact(cont);
        return cs;
    };
    auto r0 = prim(ca, cont_a);
    auto r1 = prim(cb, cont_b);
    strip_rational_content(r0);
    strip_rational_content(r1);
    if (r0.size() < r1.size()) std::swap(r0, r1);

    auto trim = [](std::vector<MPoly>& p) {
        while (!p.empty() && p.back().is_zero()) p.pop_back();
    };

    // primitive pseudo-remainder sequence with rational-content stripping
    while (true) {
        std::vector<MPoly> rem = r0;
        const MPoly lc1 = r1.back();
        while (rem.size() >= r1.size()) {
            MPoly lca = rem.back();
            size_t shift = rem.size() - r1.size();
            std::vector<MPoly> next(rem.size() - 1, MPoly(cfg));
            for (size_t i = 0; i + 1 < rem.size(); ++i) next[i] = rem[i] * lc1;
            for (size_t i = 0; i + 1 < r1.size(); ++i)
                next[shift + i] = next[shift + i] - lca * r1[i];
            rem = std::move(next);
            trim(rem);
            strip_rational_content(rem);
            if (rem.empty()) break;
        }
        if (rem.empty()) {
            MPoly cont_r = content_of(r1);
            std::vector<MPoly> pp = r1;
            for (auto& c : pp) c = c.divide_exact(cont_r);
            MPoly g = assemble_in(pp, var, cfg) * cont_g;
            return monic(g);
        }
        if (rem.size() == 1) {
            // nonzero constant remainder: primitive parts coprime in `var`
            return monic(cont_g);
        }
        MPoly cont_r = content_of(rem);
        for (auto& c : rem) c = c.divide_exact(cont_r);
        strip_rational_content(rem);
        r0 = std::move(r1);
        r1 = std::move(rem);
        if (r0.size() < r1.size()) std::swap(r0, r1);
    }
}

std::string MPoly::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    // print lex-descending so the lead term comes first
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto& [m, c] = *it;
        if (!first) os << " + ";
        first = false;
        std::string cs = c.str(cfg_->root_name());
        bool trivial_mono = true;
        for (int e : m)
            if (e != 0) trivial_mono = false;
        if (trivial_mono) {
            os << cs;
            continue;
        }
        bool need_coef = !(c.is_rational() && c.rational_part() == 1);
        if (need_coef) {
            if (cs.find(' ') != std::string::npos) cs = "(" + cs + ")";
            os << cs << "*";
        }
        bool firstv = true;
        for (size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) continue;
            if (!firstv) os << "*";
            firstv = false;
            os << cfg_->gen_name((int)i);
            if (m[i] > 1) os << "^" << m[i];
        }
    }
    return os.str();
}

// ------------------------------------------------------------------ FieldElem

FieldElem::FieldElem(FieldConfigPtr cfg, MPoly num, MPoly den)
    : cfg_(std::move(cfg)), num_(std::move(num)), den_(std::move(den)) {
    normalize();
}

void FieldElem::init_rat(const Rat& r) {
    num_ = MPoly::constant(cfg_.get(), r);
    den_ = MPoly::constant(cfg_.get(), 1);
}

FieldElem FieldElem::generator(const FieldConfigPtr& cfg, int idx) {
    return FieldElem(cfg, MPoly::generator(cfg.get(), idx), MPoly::constant(cfg.get(), 1));
}

FieldElem FieldElem::root_pow(const FieldConfigPtr& cfg, long k) {
    return FieldElem(cfg, MPoly(cfg.get(), Cyclo::root_pow(cfg.get(), k)),
                     MPoly::constant(cfg.get(), 1));
}

void FieldElem::normalize() {
    if (den_.is_zero()) throw FieldError("division by zero");
    if (num_.is_zero()) {
        den_ = MPoly::constant(cfg_.get(), 1);
        return;
    }
    MPoly g = MPoly::gcd(num_, den_);
    if (!g.is_constant()) {
        num_ = num_.divide_exact(g);
        den_ = den_.divide_exact(g);
    }
    Cyclo lc = den_.lead_coef();
    if (!(lc.is_rational() && lc.rational_part() == 1)) {
        Cyclo inv = lc.inverse();
        num_ = num_.scaled(inv);
        den_ = den_.scaled(inv);
    }
}

bool FieldElem::is_one() const {
    return num_.is_constant() && den_.is_constant() &&
           num_.constant_value() == Cyclo::one(cfg_.get()) &&
           den_.constant_value() == Cyclo::one(cfg_.get());
}

bool FieldElem::is_rational() const {
    return num_.is_constant() && den_.is_constant() && num_.constant_value().is_rational() &&
           den_.constant_value().is_rational();
}

Rat FieldElem::rational_value() const {
    if (!is_rational()) throw FieldError("not a rational value: " + str());
    Rat n = num_.constant_value().rational_part();
    Rat d = den_.constant_value().rational_part();
    return n / d;
}

void FieldElem::align(FieldElem& a, FieldElem& b) {
    if (a.cfg_->same_as(*b.cfg_)) return;
    auto big = FieldConfig::merged(*a.cfg_, *b.cfg_);
    a = a.lifted(big);
    b = b.lifted(big);
}

FieldElem FieldElem::lifted(const FieldConfigPtr& big) const {
    if (cfg_->same_as(*big)) return *this;
    if (!cfg_->embeds_in(*big)) throw FieldError("field configs incompatible");
    auto lift_poly = [&](const MPoly& p) {
        MPoly out(big.get());
        for (const auto& [m, c] : p.terms()) {
            MPoly::Mono big_m(big->gen_count(), 0);
            for (int i = 0; i < (int)m.size(); ++i) {
                if (m[i] == 0) continue;
                big_m[big->lookup(cfg_->gen_name(i))] = m[i];
            }
            // coefficient: rational part carries over; root powers re-embed
            if (c.is_rational()) {
                out.add_term(big_m, Cyclo(big.get(), c.rational_part()));
            } else {
                Cyclo nc = Cyclo::zero(big.get());
                for (size_t k = 0; k < c.coef().size(); ++k) {
                    if (c.coef()[k] == 0) continue;
                    Cyclo zk = Cyclo::root_pow(big.get(), (long)k);
                    nc = nc + zk * Cyclo(big.get(), c.coef()[k]);
                }
                out.add_term(big_m, nc);
            }
        }
        return out;
    };
    return FieldElem(big, lift_poly(num_), lift_poly(den_));
}

FieldElem FieldElem::operator-() const {
    FieldElem r = *this;
    r.num_ = -r.num_;
    return r;
}

FieldElem FieldElem::operator+(const FieldElem& o) const {
    FieldElem a = *this, b = o;
    align(a, b);
    return FieldElem(a.cfg_, a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

FieldElem FieldElem::operator-(const FieldElem& o) const { return *this + (-o); }

FieldElem FieldElem::operator*(const FieldElem& o) const {
    FieldElem a = *this, b = o;
    align(a, b);
    return FieldElem(a.cfg_, a.num_ * b.num_, a.den_ * b.den_);
}

FieldElem FieldElem::operator/(const FieldElem& o) const {
    FieldElem a = *this, b = o;
    align(a, b);
    if (b.num_.is_zero()) throw FieldError("division by zero");
    return FieldElem(a.cfg_, a.num_ * b.den_, a.den_ * b.num_);
}

FieldElem FieldElem::inverse() const { return FieldElem::one(cfg_) / *this; }

FieldElem FieldElem::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    FieldElem r = FieldElem::one(cfg_);
    FieldElem base = *this;
    while (e > 0) {
        if (e & 1) r = r * base;
        base = base * base;
        e >>= 1;
    }
    return r;
}

bool FieldElem::operator==(const FieldElem& o) const {
    if (cfg_->same_as(*o.cfg_)) return num_ == o.num_ && den_ == o.den_;
    FieldElem a = *this, b = o;
    align(a, b);
    return a.num_ == b.num_ && a.den_ == b.den_;
}

std::string FieldElem::str() const {
    if (den_.is_constant()) {
        Cyclo d = den_.constant_value();
        if (d.is_rational() && d.rational_part() == 1) return num_.str();
    }
    std::string n = num_.str(), d = den_.str();
    if (n.find(' ') != std::string::npos || n.find('*') != std::string::npos) n = "(" + n + ")";
    if (d.find(' ') != std::string::npos || d.find('*') != std::string::npos) d = "(" + d + ")";
    return n + "/" + d;
}

FieldElem operator*(const Rat& r, const FieldElem& e) { return FieldElem(e.config(), r) * e; }

// --------------------------------------------------------------------- parser

namespace {

struct Parser {
    const std::string& s;
    size_t pos = 0;
    const FieldConfigPtr& cfg;

    void skip() {
        while (pos < s.size() && isspace((unsigned char)s[pos])) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw FieldError("syntax error at position " + std::to_string(pos) + ": " + what +
                         " in \"" + s + "\"");
    }

    FieldElem expr() {
        FieldElem v = term();
        while (true) {
            skip();
            if (eat('+'))
                v = v + term();
            else if (eat('-'))
                v = v - term();
            else
                return v;
        }
    }

    FieldElem term() {
        FieldElem v = factor();
        while (true) {
            skip();
            if (eat('*'))
                v = v * factor();
            else if (eat('/'))
                v = v / factor();
            else
                return v;
        }
    }

    long integer() {
        skip();
        size_t start = pos;
        if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
        while (pos < s.size() && isdigit((unsigned char)s[pos])) ++pos;
        if (pos == start) fail("expected integer");
        return std::stol(s.substr(start, pos - start));
    }

    FieldElem factor() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (c == '-') {
            ++pos;
            return -factor();
        }
        if (c == '(') {
            ++pos;
            FieldElem v = expr();
            if (!eat(')')) fail("expected ')'");
            return v;
        }
        if (isdigit((unsigned char)c)) {
            size_t start = pos;
            while (pos < s.size() && isdigit((unsigned char)s[pos])) ++pos;
            Rat q(s.substr(start, pos - start));
            return FieldElem(cfg, q);
        }
        if (isalpha((unsigned char)c) || c == '_') {
            size_t start = pos;
            while (pos < s.size() && (isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
            std::string name = s.substr(start, pos - start);
            int idx = cfg->lookup(name);
            if (idx < 0) throw FieldError("undeclared identifier: " + name);
            FieldElem base = (idx == cfg->gen_count()) ? FieldElem::root_pow(cfg, 1)
                                                       : FieldElem::generator(cfg, idx);
            skip();
            if (pos < s.size() && s[pos] == '^') {
                ++pos;
                return base.pow(integer());
            }
            return base;
        }
        fail("unexpected character");
    }
};

}  // namespace

FieldElem parse_expr(const std::string& text, const FieldConfigPtr& cfg) {
    Parser p{text, 0, cfg};
    FieldElem v = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return v;
}

}  // namespace gwcone
