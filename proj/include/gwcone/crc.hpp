#pragma once

#include "gwcone/cone.hpp"
#include "gwcone/gwtable.hpp"
#include "gwcone/potential.hpp"
#include "gwcone/umatrix.hpp"

namespace gwcone {

struct SemiPositiveResult {
    bool semi_positive = false;
    std::string witness;  // offending class, when not semi-positive
    Report report;        // includes the vanishing-proposition audit
};

/// Semi-positivity of X: no effective class d with
/// 3 - dim_C <= c1(TX).d < 0. Effective classes are the table's support
/// monoid plus the declared extras; the audit also reports any nonzero
/// invariant with c1.d < 0 as a contradiction witness.
SemiPositiveResult semipositive(const CorrelatorTable& tX);

struct QuantumCorrections {
    std::vector<Series> f;  // per Y basis index; exceptional degree-2 support
    Report report;
};

/// The mirror-map correction f = sum_{d != 0, c1.d = 0} sum_e
/// (-1)^{w_e/2+1} <phi^e psi^{w_e/2-2}>_{0,1,d} U^d b_e, with b_e the
/// degree-two z^0 part of U(phi_e z^{-w_e/2+1}). Verifies that f is
/// exceptional (pi_! f = 0).
QuantumCorrections quantum_corrections_f(const CorrelatorTable& tX, const LaurentMatrix& u,
                                         const ResolutionMap& rm, const OrderSpec& order);

/// Cohomological pipeline: the exceptional-degree limit of the Y small
/// quantum product with Q_i = e^{c_i}, transported along the Birkhoff U_0,
/// against X's Chen-Ruan table.
Report ccrc_check(const CorrelatorTable& tX, const CorrelatorTable& tY, const LaurentMatrix& u,
                  const ResolutionMap& rm, const OrderSpec& order);

/// Small-quantum-product pipeline with the change of variables
/// Q_i = e^{c_i + f_i} U_i (i <= s), e^{c_i + f_i} (i > s). apply_f = false
/// runs the control variant without the mirror-map correction.
Report ruan_check(const CorrelatorTable& tX, const CorrelatorTable& tY, const LaurentMatrix& u,
                  const ResolutionMap& rm, const OrderSpec& order, bool apply_f = true);

/// Big-quantum-product pipeline for U without positive z-powers: Lemma-U0
/// items and the comparison at t = U_0(tau) with basepoint shift c.
Report bg_check(const CorrelatorTable& tX, const CorrelatorTable& tY, const LaurentMatrix& u,
                const ResolutionMap& rm, const OrderSpec& order);

/// Twisted-gerbe equivalence: the cohomological pipeline against
/// twist(tY, theta_c) with all exceptional Q_i = 1 must agree with the
/// untwisted pipeline outcome.
Report modified_pipelines(const CorrelatorTable& tX, const CorrelatorTable& tY,
                          const LaurentMatrix& u, const ResolutionMap& rm,
                          const OrderSpec& order);

}  // namespace gwcone
