#include "pdstsp/generator.hpp"

#include <algorithm>
#include <cmath>

#include "pdstsp/rng.hpp"

namespace pdstsp {

Instance gen_instance(const GenSpec& spec, int index) {
  if (spec.n < 1) throw ConfigError("gen: n must be at least 1");
  const std::uint64_t stream = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
  Rng rng(stream);

  Instance inst;
  inst.n = spec.n;
  inst.revenue_setting = spec.revenue_setting;
  inst.seed = stream;
  inst.coords.resize(static_cast<std::size_t>(2 * spec.n + 2));
  for (auto& p : inst.coords) {
    p.x = rng.uniform();
    p.y = rng.uniform();
  }
  inst.demand.resize(static_cast<std::size_t>(spec.n));
  for (auto& q : inst.demand) q = static_cast<int>(rng.uniform_int(2, 5));
  inst.capacity = static_cast<int>(rng.uniform_int(8, 20));

  const double depot_gap = inst.dist(inst.start(), inst.end());
  const auto lo = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(3.0 * spec.n / 20.0 * depot_gap)));
  const auto hi = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(10.0 * spec.n / 20.0 * depot_gap)));
  inst.max_length = static_cast<double>(rng.uniform_int(lo, std::max(lo, hi)));

  inst.revenue.resize(static_cast<std::size_t>(spec.n));
  for (RequestId h = 1; h <= spec.n; ++h) {
    auto& r = inst.revenue[static_cast<std::size_t>(h - 1)];
    switch (spec.revenue_setting) {
      case RevenueSetting::distance:
        r = inst.dist(inst.pickup(h), inst.delivery(h));
        break;
      case RevenueSetting::ton_distance:
        r = inst.demand_of(h) * inst.dist(inst.pickup(h), inst.delivery(h)) * rng.uniform(0.5, 1.5);
        break;
      case RevenueSetting::uniform:
        r = static_cast<double>(rng.uniform_int(1, 100)) / 100.0;
        break;
      case RevenueSetting::constant:
        r = 1.0;
        break;
    }
  }
  if (spec.revenue_setting == RevenueSetting::ton_distance) {
    const double top = *std::max_element(inst.revenue.begin(), inst.revenue.end());
    if (top > 0.0) {
      for (auto& r : inst.revenue) r /= top;
    }
  }
  return inst;
}

std::vector<Instance> gen_batch(const GenSpec& spec) {
  if (spec.count < 1) throw ConfigError("gen: count must be at least 1");
  std::vector<Instance> out;
  out.reserve(static_cast<std::size_t>(spec.count));
  for (int i = 0; i < spec.count; ++i) out.push_back(gen_instance(spec, i));
  return out;
}

}  // namespace pdstsp
