#pragma once

#include "gwcone/gwtable.hpp"
#include "gwcone/potential.hpp"
#include "gwcone/series.hpp"

namespace gwcone {

/// Omega(f, g) = Res_{z=0} (f(-z), g(z)) dz: the z^{-1} coefficient of the
/// pairing. Throws SeriesError ("incomplete-window") when the residue falls
/// outside the product guarantee.
Series omega(const Series& f, const Series& g);

/// Dilaton shift q(z) = t(z) - z and its inverse.
Series dilaton_shift(const Series& t);
Series dilaton_unshift(const Series& q);

/// J(tau, -z) at formal tau, with first and second coordinate partials.
/// The H+-part of the basepoint is -z + tau by construction; the audit
/// re-verifies it from the assembled data.
struct ConeFrame {
    VarSpacePtr space;
    Series basepoint;
    std::vector<Series> partial;
    std::vector<std::vector<Series>> second;
};

ConeFrame j_function(const CorrelatorTable& t, const OrderSpec& order);

/// Frobenius data read off a frame: metric g_ab = Omega(dJ_a, z^{-1} dJ_b),
/// cubic c_abg = Omega(d2J_bg, dJ_a), and the induced product (structure
/// constants as scalar series, index raised with the constant metric).
struct FrobeniusData {
    std::vector<std::vector<Series>> metric;   // scalar series, expected constant
    std::vector<std::vector<std::vector<Series>>> cubic;
    std::vector<std::vector<std::vector<Series>>> structure;  // c_{ab}^e
};

FrobeniusData frobenius_from_frame(const ConeFrame& fr);

/// Cone-property audit:
///   (i)   H+-projection of J equals -z + tau, and the divisor-equation
///         factorization of J holds;
///   (ii)  quantum differential equation -z d2J_ab = sum_e c_ab^e dJ_e;
///   (iii) the identity field: c_{0b}^e = delta;
///   (iv)  frame spanning: z dJ_a and z^{-1} J lie in the Lambda[z]-span of
///         the frame (solved by top-down elimination);
///   (v)   V-independence: tensors recomputed through the opposite subspace
///         e^{rho/z} H- agree with the H- ones.
/// Identities are checked coefficientwise (formal tau); each tau sample then
/// re-evaluates the QDE at that point. The large-radius check compares the
/// Novikov-degree-0, tau_rest-free stratum with -z e^{-tau_two/z} and is
/// labelled a surrogate for the analytic limit.
Report cone_audit(const CorrelatorTable& t, const OrderSpec& order,
                  const std::vector<std::vector<Rat>>& tau_samples,
                  const std::vector<Rat>& rho_sample);

}  // namespace gwcone
