// Bernoulli-gate kernels over a counter-based random stream.
//
// Both entry points evaluate value(i) = mix64(base + i * kGamma) for
// i in [0, n) and test value(i) < threshold. The scalar implementation is
// the reference; SIMD variants must produce bit-identical results and are
// selected at runtime from CPU capabilities.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace rti::kernels {

enum class Lane { Scalar, Avx2 };

std::string_view to_string(Lane lane);

// Lane selected at startup (best supported), unless overridden.
Lane active_lane();
bool lane_supported(Lane lane);
// Overrides the dispatch choice; throws std::invalid_argument when the lane
// is not supported on this CPU. Intended for tests and benchmarks.
void set_lane(Lane lane);

// Number of i in [0, n) with mix64(base + i*kGamma) < threshold.
std::uint64_t gate_count(std::uint64_t base, std::uint64_t threshold, std::uint64_t n);

// Appends every firing index to `hits`; returns the number appended.
std::size_t gate_collect(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                         std::vector<std::uint32_t>& hits);

// Reference implementations, callable directly (equivalence tests).
std::uint64_t gate_count_scalar(std::uint64_t base, std::uint64_t threshold, std::uint64_t n);
std::size_t gate_collect_scalar(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                                std::vector<std::uint32_t>& hits);

#if defined(RTI_HAVE_AVX2)
std::uint64_t gate_count_avx2(std::uint64_t base, std::uint64_t threshold, std::uint64_t n);
std::size_t gate_collect_avx2(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                              std::vector<std::uint32_t>& hits);
#endif

} // namespace rti::kernels
