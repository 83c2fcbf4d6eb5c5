#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gwcone {

using Rat = mpq_class;

Rat rat_of(long num, long den = 1);
Rat parse_rational(const std::string& text);
std::string rat_str(const Rat& q);

struct FieldError : std::runtime_error {
    explicit FieldError(const std::string& what) : std::runtime_error(what) {}
};

/// A declared symbolic constant: either a free transcendental generator or
/// the single primitive N-th root of unity of the coefficient field.
struct ConstDecl {
    std::string name;
    int root_order = 0;  // 0 = transcendental, N >= 1 = primitive N-th root

    bool is_root() const { return root_order > 0; }
};

/// Shared description of the coefficient field Q(zeta_N)(g_1,...,g_m).
/// Generator order is the declaration order; it fixes the monomial order
/// (lex) and hence the normal form of every element.
class FieldConfig {
  public:
    FieldConfig() { init(); }
    explicit FieldConfig(std::vector<ConstDecl> decls);

    static std::shared_ptr<const FieldConfig> rationals();
    static std::shared_ptr<const FieldConfig> make(std::vector<ConstDecl> decls);

    const std::vector<ConstDecl>& decls() const { return decls_; }
    int root_order() const { return root_order_; }
    const std::string& root_name() const { return root_name_; }
    int cyclo_degree() const { return (int)cyclo_.size() - 1; }
    const std::vector<Rat>& cyclo_poly() const { return cyclo_; }

    int gen_count() const { return (int)gen_names_.size(); }
    const std::string& gen_name(int i) const { return gen_names_[i]; }

    // -1 if unknown; gen_count() means "the root of unity".
    int lookup(const std::string& name) const;

    bool same_as(const FieldConfig& o) const;
    /// True when every constant of *this appears in `big` with the same kind
    /// and the root orders agree (N | N' embeddings are not needed here;
    /// files that interoperate must declare one common root order).
    bool embeds_in(const FieldConfig& big) const;

    /// Union of two declaration lists; throws on conflicting kinds or two
    /// distinct root orders.
    static std::shared_ptr<const FieldConfig> merged(const FieldConfig& a, const FieldConfig& b);

  private:
    void init();

    std::vector<ConstDecl> decls_;
    std::vector<std::string> gen_names_;
    std::string root_name_;
    int root_order_ = 1;
    std::vector<Rat> cyclo_;  // cyclotomic polynomial Phi_N, monic, over Q
};

using FieldConfigPtr = std::shared_ptr<const FieldConfig>;

/// Element of Q(zeta_N): residue class modulo Phi_N, dense coefficients.
class Cyclo {
  public:
    Cyclo() = default;
    Cyclo(const FieldConfig* cfg, Rat r);

    static Cyclo zero(const FieldConfig* cfg) { return Cyclo(cfg, 0); }
    static Cyclo one(const FieldConfig* cfg) { return Cyclo(cfg, 1); }
    static Cyclo root_pow(const FieldConfig* cfg, long k);

    bool is_zero() const;
    bool is_rational() const;
    Rat rational_part() const { return coef_.empty() ? Rat(0) : coef_[0]; }
    const std::vector<Rat>& coef() const { return coef_; }

    Cyclo operator-() const;
    Cyclo operator+(const Cyclo& o) const;
    Cyclo operator-(const Cyclo& o) const;
    Cyclo operator*(const Cyclo& o) const;
    Cyclo inverse() const;
    bool operator==(const Cyclo& o) const { return coef_ == o.coef_; }
    bool operator!=(const Cyclo& o) const { return !(*this == o); }

    std::string str(const std::string& root_name) const;

  private:
    void reduce(std::vector<Rat>& raw) const;

    const FieldConfig* cfg_ = nullptr;
    std::vector<Rat> coef_;  // length = cyclo_degree(), low-to-high
};

/// Sparse multivariate polynomial over Q(zeta_N) in the transcendental
/// generators. Monomials are exponent vectors ordered lexicographically.
class MPoly {
  public:
    using Mono = std::vector<int>;

    MPoly() = default;
    explicit MPoly(const FieldConfig* cfg) : cfg_(cfg) {}
    MPoly(const FieldConfig* cfg, const Cyclo& c);

    static MPoly constant(const FieldConfig* cfg, Rat r);
    static MPoly generator(const FieldConfig* cfg, int idx);

    const FieldConfig* cfg() const { return cfg_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    Cyclo constant_value() const;
    const std::map<Mono, Cyclo>& terms() const { return terms_; }

    MPoly operator-() const;
    MPoly operator+(const MPoly& o) const;
    MPoly operator-(const MPoly& o) const;
    MPoly operator*(const MPoly& o) const;
    MPoly scaled(const Cyclo& c) const;
    bool operator==(const MPoly& o) const { return terms_ == o.terms_; }

    /// Leading (lex-greatest) term.
    const Mono& lead_mono() const;
    const Cyclo& lead_coef() const;

    int degree_in(int var) const;

    /// Exact division; throws if not divisible.
    MPoly divide_exact(const MPoly& d) const;
    static MPoly gcd(const MPoly& a, const MPoly& b);

    void add_term(const Mono& m, const Cyclo& c);
    std::string str() const;

  private:
    const FieldConfig* cfg_ = nullptr;
    std::map<Mono, Cyclo> terms_;
};

/// Element of the field Q(zeta_N)(g_1,...,g_m), kept in normal form:
/// gcd(num, den) = 1 and den monic under lex. Structural equality is
/// mathematical equality.
class FieldElem {
  public:
    FieldElem() : cfg_(FieldConfig::rationals()) { init_rat(0); }
    explicit FieldElem(Rat r) : cfg_(FieldConfig::rationals()) { init_rat(r); }
    FieldElem(FieldConfigPtr cfg, Rat r) : cfg_(std::move(cfg)) { init_rat(r); }
    FieldElem(FieldConfigPtr cfg, MPoly num, MPoly den);

    static FieldElem zero(const FieldConfigPtr& cfg) { return FieldElem(cfg, Rat(0)); }
    static FieldElem one(const FieldConfigPtr& cfg) { return FieldElem(cfg, Rat(1)); }
    static FieldElem generator(const FieldConfigPtr& cfg, int idx);
    static FieldElem root_pow(const FieldConfigPtr& cfg, long k);

    const FieldConfigPtr& config() const { return cfg_; }
    const MPoly& num() const { return num_; }
    const MPoly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_one() const;
    bool is_rational() const;
    Rat rational_value() const;  // throws unless is_rational()

    FieldElem operator-() const;
    FieldElem operator+(const FieldElem& o) const;
    FieldElem operator-(const FieldElem& o) const;
    FieldElem operator*(const FieldElem& o) const;
    FieldElem operator/(const FieldElem& o) const;
    FieldElem inverse() const;
    FieldElem pow(long e) const;
    bool operator==(const FieldElem& o) const;
    bool operator!=(const FieldElem& o) const { return !(*this == o); }

    FieldElem& operator+=(const FieldElem& o) { return *this = *this + o; }
    FieldElem& operator-=(const FieldElem& o) { return *this = *this - o; }
    FieldElem& operator*=(const FieldElem& o) { return *this = *this * o; }

    /// Re-express over a larger config (matching constants by name).
    FieldElem lifted(const FieldConfigPtr& big) const;

    std::string str() const;

  private:
    void init_rat(const Rat& r);
    void normalize();
    static void align(FieldElem& a, FieldElem& b);

    FieldConfigPtr cfg_;
    MPoly num_, den_;
};

FieldElem operator*(const Rat& r, const FieldElem& e);

/// Parse an expression over the grammar
///   expr   ::= term (("+"|"-") term)*
///   term   ::= factor (("*"|"/") factor)*
///   factor ::= rational | ident | ident "^" integer | "(" expr ")" | "-" factor
FieldElem parse_expr(const std::string& text, const FieldConfigPtr& cfg);

}  // namespace gwcone
