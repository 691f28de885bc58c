// Runtime kernel dispatch: picks the widest supported lane at startup.
#include "rti/kernels.hpp"

#include <atomic>
#include <stdexcept>

#include "rti/rng.hpp"

namespace rti::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(RTI_HAVE_AVX2) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Lane detect_best() {
    return cpu_has_avx2() ? Lane::Avx2 : Lane::Scalar;
}

std::atomic<Lane> g_lane{detect_best()};

} // namespace

std::string_view to_string(Lane lane) {
    switch (lane) {
        case Lane::Scalar: return "scalar";
        case Lane::Avx2: return "avx2";
    }
    return "?";
}

Lane active_lane() { return g_lane.load(std::memory_order_relaxed); }

bool lane_supported(Lane lane) {
    switch (lane) {
        case Lane::Scalar: return true;
        case Lane::Avx2: return cpu_has_avx2();
    }
    return false;
}

void set_lane(Lane lane) {
    if (!lane_supported(lane))
        throw std::invalid_argument("kernel lane not supported on this CPU");
    g_lane.store(lane, std::memory_order_relaxed);
}

std::uint64_t gate_count(std::uint64_t base, std::uint64_t threshold, std::uint64_t n) {
#if defined(RTI_HAVE_AVX2)
    if (active_lane() == Lane::Avx2) return gate_count_avx2(base, threshold, n);
#endif
    return gate_count_scalar(base, threshold, n);
}

std::size_t gate_collect(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                         std::vector<std::uint32_t>& hits) {
#if defined(RTI_HAVE_AVX2)
    if (active_lane() == Lane::Avx2) return gate_collect_avx2(base, threshold, n, hits);
#endif
    return gate_collect_scalar(base, threshold, n, hits);
}

} // namespace rti::kernels
