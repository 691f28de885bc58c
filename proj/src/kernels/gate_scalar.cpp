// Scalar reference implementation of the Bernoulli-gate kernels.
#include "rti/kernels.hpp"

#include "rti/rng.hpp"

namespace rti::kernels {

std::uint64_t gate_count_scalar(std::uint64_t base, std::uint64_t threshold, std::uint64_t n) {
    std::uint64_t count = 0;
    std::uint64_t state = base;
    for (std::uint64_t i = 0; i < n; ++i) {
        count += mix64(state) < threshold;
        state += kGamma;
    }
    return count;
}

std::size_t gate_collect_scalar(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                                std::vector<std::uint32_t>& hits) {
    std::size_t before = hits.size();
    std::uint64_t state = base;
    for (std::uint32_t i = 0; i < n; ++i) {
        if (mix64(state) < threshold) hits.push_back(i);
        state += kGamma;
    }
    return hits.size() - before;
}

} // namespace rti::kernels
