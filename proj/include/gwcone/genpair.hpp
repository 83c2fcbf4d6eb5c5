#pragma once

#include "gwcone/crc.hpp"

namespace gwcone {

/// A synthetic crepant pair built so the conjecture pipelines hold by
/// construction: Y-side data is produced from X-side data through a chosen
/// transformation acting on truncated frames, solving the substituted
/// structure-constant identities order by order.
struct SyntheticPair {
    RingPtr ringX, ringY;
    ResolutionMap rm;
    CorrelatorTable tableX, tableY;
    LaurentMatrix u;
    std::vector<Rat> phases;  // the B-field phases carried by u
};

/// Pair with a nonzero B-field (phase 1/2 on the exceptional direction) and a
/// nonzero single-term mirror-map correction f; exercises ccrc_check,
/// ruan_check, and modified_pipelines. s = 1, r = 2, rank 6.
SyntheticPair gen_pair_crc(long deg_bound = 2);

/// Hard-Lefschetz-type pair: constant U, Y-data the straight transport of a
/// closed X table; exercises bg_check at coord order 2.
SyntheticPair gen_pair_bg(long deg_bound = 2, int max_n = 5);

/// File renderers for the CLI gen-pair subcommand.
std::string render_ring(const Ring& r);
std::string render_gw(const CorrelatorTable& t);
std::string render_umat(const LaurentMatrix& u);
std::string render_resmap(const ResolutionMap& rm);

}  // namespace gwcone
