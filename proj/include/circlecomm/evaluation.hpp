#pragma once

#include "circlecomm/community.hpp"

namespace circlecomm {

/// Fraction of unordered vertex pairs on which p1 and p2 agree.
double rand_index(const Partition& p1, const Partition& p2);

/// Hubert–Arabie chance-corrected Rand index. Returns 0 when both partitions
/// are trivial and the correction is undefined.
double adjusted_rand_index(const Partition& p1, const Partition& p2);

}  // namespace circlecomm
