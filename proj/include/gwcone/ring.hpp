#pragma once

#include "gwcone/field.hpp"
#include "gwcone/matrix.hpp"
#include "gwcone/report.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace gwcone {

struct RingError : std::runtime_error {
    explicit RingError(const std::string& what) : std::runtime_error(what) {}
};

struct BasisClass {
    std::string name;
    int degree = 0;   // age-shifted real degree
    bool twisted = false;
};

/// Graded basis of H*_CR(X) or H*(Y) with the (orbifold) Poincare pairing and
/// the classical (cup / Chen-Ruan) product table. Immutable after load; all
/// structural invariants are verified by load_ring / validate.
class Ring {
  public:
    std::string name;
    int dim_c = 0;
    FieldConfigPtr cfg;
    std::vector<BasisClass> basis;
    FMatrix pairing;                 // (N+1) x (N+1)
    std::vector<std::string> novikov;  // quantum parameter names
    int novikov_denom = 1;             // common denominator m of exponents
    std::vector<Rat> c1;               // c1(TZ) . beta_i per Novikov variable

    // classical structure constants: product[a][b] = coefficient vector
    std::vector<std::vector<std::vector<FieldElem>>> product;

    int size() const { return (int)basis.size(); }
    int degree(int i) const { return basis[i].degree; }
    bool has_odd_classes() const;

    const std::vector<FieldElem>& classical_product(int a, int b) const;
    std::vector<FieldElem> cup(const std::vector<FieldElem>& u,
                               const std::vector<FieldElem>& v) const;

    /// Matrix M with phi^a = sum_b M[a][b] phi_b and (phi^a, phi_b) = delta.
    const FMatrix& dual_basis() const { return dual_; }
    FieldElem pair(const std::vector<FieldElem>& u, const std::vector<FieldElem>& v) const;

    /// Matrix of cup-by-(basis element a) acting on coefficient vectors.
    FMatrix cup_matrix(int a) const;

    Rat c1_dot(const std::vector<Rat>& degree_vec) const;

    void validate() const;  // throws RingError with the violated invariant

    FMatrix dual_;  // set by seal_ring / load_ring
};

using RingPtr = std::shared_ptr<const Ring>;

std::shared_ptr<Ring> make_ring();
/// Finalize a hand-built ring: computes the dual basis and validates.
RingPtr seal_ring(std::shared_ptr<Ring> r);

RingPtr load_ring(std::istream& in, const std::string& source_name = "<ring>");
RingPtr load_ring_file(const std::string& path);

/// Crepant-resolution bookkeeping between two loaded rings, following the
/// basis conventions: X carries s Novikov variables, Y carries r of them,
/// indices s+1..r of Y's degree-2 block are the exceptional classes.
struct ResolutionMap {
    RingPtr ringX, ringY;
    int s = 0, r = 0;

    std::vector<int> exceptional_indices() const {
        std::vector<int> v;
        for (int i = s + 1; i <= r; ++i) v.push_back(i);
        return v;
    }
    void validate() const;
};

ResolutionMap load_resmap(std::istream& in, RingPtr x, RingPtr y);

}  // namespace gwcone
