#pragma once

#include "gwcone/gwtable.hpp"
#include "gwcone/matrix.hpp"
#include "gwcone/report.hpp"
#include "gwcone/ring.hpp"

#include <iosfwd>
#include <map>

namespace gwcone {

struct UmatError : std::runtime_error {
    explicit UmatError(const std::string& what) : std::runtime_error(what) {}
};

/// Laurent polynomial in z over the exact field.
class ZLaurent {
  public:
    std::map<int, FieldElem> coef;  // exponent -> nonzero coefficient

    bool is_zero() const { return coef.empty(); }
    int lo() const { return coef.empty() ? 0 : coef.begin()->first; }
    int hi() const { return coef.empty() ? 0 : coef.rbegin()->first; }
    FieldElem at(int k, const FieldConfigPtr& cfg) const;

    void add(int k, const FieldElem& c);
    ZLaurent operator+(const ZLaurent& o) const;
    ZLaurent operator-() const;
    ZLaurent operator*(const ZLaurent& o) const;
    ZLaurent shifted(int k) const;
    ZLaurent scaled(const FieldElem& c) const;
    ZLaurent z_negated() const;  // z -> -z
    bool operator==(const ZLaurent& o) const { return coef == o.coef; }

    std::string str() const;
};

/// Square matrix of z-Laurent polynomials representing a symplectic
/// transformation H_X -> H_Y: column j holds the Y-coordinates of the image
/// of the j-th X basis class. Entries carry no Novikov variables (condition
/// (d) holds by construction of the coefficient field).
class LaurentMatrix {
  public:
    RingPtr ringX, ringY;
    FieldConfigPtr cfg;
    int n = 0;
    std::vector<ZLaurent> e;  // row-major

    LaurentMatrix() = default;
    LaurentMatrix(RingPtr x, RingPtr y, FieldConfigPtr cfg);

    static LaurentMatrix identity(RingPtr x, RingPtr y, FieldConfigPtr cfg);
    /// Promote a constant matrix.
    static LaurentMatrix constant(const FMatrix& m, RingPtr x, RingPtr y, FieldConfigPtr cfg);

    ZLaurent& at(int i, int j) { return e[i * n + j]; }
    const ZLaurent& at(int i, int j) const { return e[i * n + j]; }

    LaurentMatrix operator*(const LaurentMatrix& o) const;
    bool operator==(const LaurentMatrix& o) const;
    bool has_positive_powers() const;
    bool is_identity() const;
    FMatrix z_coefficient(int k) const;
    std::string str() const;
};

LaurentMatrix load_umatrix(std::istream& in, RingPtr x, RingPtr y,
                           const std::string& source = "<umat>");
LaurentMatrix load_umatrix_file(const std::string& path, RingPtr x, RingPtr y);

/// Symplectic/grading condition checks (Conjecture conditions (a)-(d) plus
/// degree preservation, symplecticity, and the low-degree diagnostics).
/// Condition (b) needs the resolution map for pi^*; it is skipped with a WARN
/// when rm is null.
Report check_conditions(const LaurentMatrix& u, const ResolutionMap* rm);

struct CExtract {
    std::vector<FieldElem> c;  // degree-2 coefficient vector over ring Y
    bool rational_verdict = false;
    std::vector<Rat> phase;  // x_i with c_i = x_i * (imaginary unit); the
                             // specialization value is e^{c_i} = zeta^{N x_i}
    std::string note;
};

/// Read c off U(1_X) = 1_Y - c z^{-1} + O(z^{-2}). The verdict passes when
/// every c_i is a rational multiple of the declared order-4 root (or zero);
/// the rational multiple is interpreted as the phase in units of 2 pi i.
CExtract extract_c(const LaurentMatrix& u);

struct BirkhoffFactors {
    LaurentMatrix minus;  // I + strictly negative powers (Y -> Y)
    LaurentMatrix zero;   // constant invertible (X -> Y)
    LaurentMatrix plus;   // I + strictly positive powers (X -> X)
};

/// Birkhoff factorization U = U_- U_0 U_+ by column elimination. Column
/// processing order is configurable so determinism can be cross-checked;
/// the factors are unique regardless.
BirkhoffFactors birkhoff(const LaurentMatrix& u, bool reversed_column_order = false);

/// T_- = U_-, T_+ = U_0 U_+ U_0^{-1}; both Y -> Y.
std::pair<LaurentMatrix, LaurentMatrix> assemble_T(const BirkhoffFactors& f);

/// e^{rho/z} U for a degree-two class rho on Y (coefficient vector).
LaurentMatrix gerbe_shift(const LaurentMatrix& u, const std::vector<FieldElem>& rho);

/// U^T(-z) G_Y U(z) as a Laurent matrix; symplecticity is this equaling G_X.
LaurentMatrix symplectic_gram(const LaurentMatrix& u);

}  // namespace gwcone
