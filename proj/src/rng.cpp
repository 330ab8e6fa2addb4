#include "bolab/rng.hpp"

#include <cmath>

namespace bolab {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

uint64_t mix(uint64_t seed, uint64_t stream, uint64_t index, uint64_t salt) {
  uint64_t h = splitmix64(seed ^ 0x7f4a7c15ull);
  h = splitmix64(h ^ splitmix64(stream + 0x165667b19e3779f9ull));
  h = splitmix64(h ^ splitmix64(index + salt));
  return splitmix64(h);
}

double to_unit(uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

std::pair<double, double> CounterRng::normal_pair(uint64_t stream, uint64_t index) const {
  const double u1 = to_unit(mix(seed_, stream, index, 0x243f6a8885a308d3ull));
  const double u2 = to_unit(mix(seed_, stream, index, 0x13198a2e03707344ull));
  const double r = std::sqrt(-2.0 * std::log(std::max(u1, 0x1.0p-60)));
  const double th = 2.0 * M_PI * u2;
  return {r * std::cos(th), r * std::sin(th)};
}

double CounterRng::uniform(uint64_t stream, uint64_t index) const {
  return to_unit(mix(seed_, stream, index, 0xa4093822299f31d0ull));
}

}  // namespace bolab
