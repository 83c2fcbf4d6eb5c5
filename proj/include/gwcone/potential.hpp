#pragma once

#include "gwcone/gwtable.hpp"
#include "gwcone/series.hpp"

namespace gwcone {

/// Genus-zero Gromov-Witten potential as a scalar series in the coordinate
/// variables t0..tN and the Novikov variables. Coefficients come straight
/// from the table; a dimension-admissible key missing within the order is an
/// Underdetermined error naming it.
Series genus0_potential(const CorrelatorTable& t, const OrderSpec& order);

/// Coordinate space used by genus0_potential (names t0..tN).
VarSpacePtr potential_space(const RingPtr& ring);

/// Descendant potential in variables t<i> (psi^0 slot) and t<a>_<i> for
/// 1 <= a <= psi_max.
Series descendant_potential(const CorrelatorTable& t, const OrderSpec& order, int psi_max);
VarSpacePtr descendant_space(const RingPtr& ring, int psi_max);

/// phi_a *_tau phi_b as an H-valued series over potential_space; components
/// are taken in the phi basis (the dual-basis contraction is applied).
/// Assembled from third derivatives of the potential.
Series big_quantum_product(const CorrelatorTable& t, int a, int b, const OrderSpec& order);

/// Independent assembly of the same product through the divisor form
/// (exponentials in the degree-two directions, tau_rest insertions only).
Series big_quantum_product_divisor(const CorrelatorTable& t, int a, int b,
                                   const OrderSpec& order);

/// Big product at tau = 0.
Series small_quantum_product(const CorrelatorTable& t, int a, int b, const OrderSpec& order);

/// F^* for the resolution Y: the Y potential with exceptional Novikov
/// variables specialized to 1 and the rest renamed along pi_*. The result
/// stays on Y's variable space; its first s Novikov slots carry the X
/// variables U_i = Q_i.
Series modified_potential(const CorrelatorTable& tY, const ResolutionMap& rm,
                          const OrderSpec& order);

/// Associativity, commutativity, and Frobenius audit of the big quantum
/// product; divisor-form agreement is included. Every FAIL names the
/// violated coefficient.
Report wdvv_audit(const CorrelatorTable& t, const OrderSpec& order);

}  // namespace gwcone
