#pragma once

#include <cstdint>
#include <vector>

#include "pdstsp/core.hpp"

namespace pdstsp {

struct GenSpec {
  int n = 10;
  RevenueSetting revenue_setting = RevenueSetting::distance;
  std::uint64_t seed = 0;
  int count = 1;
};

/// Random instance in the unit square. Deterministic in (spec.seed, index) and
/// independent of the other instances of the batch.
///
///   demand      q_h ~ Unif{2,3,4,5}
///   capacity    Q   ~ Unif{8,...,20}
///   max_length  T   ~ Unif{lo,...,hi} on the integer grid, with
///               lo = max(2, ceil(3n/20 * c_{0,2n+1})), hi = max(2, ceil(10n/20 * c_{0,2n+1}))
///   revenue     distance:     c_{h,h+n}
///               ton_distance: q_h * c_{h,h+n} * mu_h, mu_h ~ U(0.5, 1.5), scaled to max 1
///               uniform:      Unif{1..100} / 100
///               constant:     1
Instance gen_instance(const GenSpec& spec, int index);

std::vector<Instance> gen_batch(const GenSpec& spec);

}  // namespace pdstsp
