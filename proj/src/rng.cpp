#include "rti/rng.hpp"

#include <cmath>
#include <limits>

namespace rti {

std::uint64_t threshold_from_prob(double p) {
    if (!(p > 0.0)) return 0;
    if (p >= 1.0) return std::numeric_limits<std::uint64_t>::max();
    long double scaled = std::ldexp(static_cast<long double>(p), 64) + 0.5L;
    const long double limit = std::ldexp(1.0L, 64);
    if (scaled >= limit) return std::numeric_limits<std::uint64_t>::max();
    return static_cast<std::uint64_t>(scaled);
}

} // namespace rti
