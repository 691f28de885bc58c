// AVX2 implementation of the Bernoulli-gate kernels. Four 64-bit lanes;
// must match gate_*_scalar bit for bit (enforced by the equivalence tests).
// Compiled with -mavx2; callers go through the runtime dispatcher.
#include "rti/kernels.hpp"

#if defined(RTI_HAVE_AVX2)

#include <immintrin.h>

#include "rti/rng.hpp"

namespace rti::kernels {

namespace {

// 64x64 -> low 64 multiply. AVX2 has no vpmullq, so assemble the low half
// from 32-bit partial products (Fog's vector class technique).
inline __m256i mullo64(__m256i a, __m256i b) {
    __m256i bswap   = _mm256_shuffle_epi32(b, 0xB1);        // b hi/lo swapped
    __m256i prodlh  = _mm256_mullo_epi32(a, bswap);         // aL*bH, aH*bL per dword
    __m256i zero    = _mm256_setzero_si256();
    __m256i prodlh2 = _mm256_hadd_epi32(prodlh, zero);      // cross terms summed
    __m256i prodlh3 = _mm256_shuffle_epi32(prodlh2, 0x73);  // into high dwords
    __m256i prodll  = _mm256_mul_epu32(a, b);               // aL*bL full 64-bit
    return _mm256_add_epi64(prodll, prodlh3);
}

inline __m256i mix64_vec(__m256i z) {
    const __m256i c1 = _mm256_set1_epi64x(static_cast<long long>(0xBF58476D1CE4E5B9ull));
    const __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(0x94D049BB133111EBull));
    z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 30)), c1);
    z = mullo64(_mm256_xor_si256(z, _mm256_srli_epi64(z, 27)), c2);
    return _mm256_xor_si256(z, _mm256_srli_epi64(z, 31));
}

// Unsigned x < t per 64-bit lane (AVX2 compare is signed; flip sign bits).
inline __m256i lt_u64(__m256i x, __m256i t) {
    const __m256i sign = _mm256_set1_epi64x(static_cast<long long>(0x8000000000000000ull));
    return _mm256_cmpgt_epi64(_mm256_xor_si256(t, sign), _mm256_xor_si256(x, sign));
}

} // namespace

std::uint64_t gate_count_avx2(std::uint64_t base, std::uint64_t threshold, std::uint64_t n) {
    const __m256i thr  = _mm256_set1_epi64x(static_cast<long long>(threshold));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * kGamma));
    __m256i state = _mm256_setr_epi64x(
        static_cast<long long>(base),
        static_cast<long long>(base + kGamma),
        static_cast<long long>(base + 2 * kGamma),
        static_cast<long long>(base + 3 * kGamma));

    std::uint64_t count = 0;
    std::uint64_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i hit = lt_u64(mix64_vec(state), thr);
        count += static_cast<unsigned>(__builtin_popcount(
            _mm256_movemask_pd(_mm256_castsi256_pd(hit))));
        state = _mm256_add_epi64(state, step);
    }
    for (std::uint64_t s = base + i * kGamma; i < n; ++i, s += kGamma)
        count += mix64(s) < threshold;
    return count;
}

std::size_t gate_collect_avx2(std::uint64_t base, std::uint64_t threshold, std::uint32_t n,
                              std::vector<std::uint32_t>& hits) {
    const std::size_t before = hits.size();
    const __m256i thr  = _mm256_set1_epi64x(static_cast<long long>(threshold));
    const __m256i step = _mm256_set1_epi64x(static_cast<long long>(4 * kGamma));
    __m256i state = _mm256_setr_epi64x(
        static_cast<long long>(base),
        static_cast<long long>(base + kGamma),
        static_cast<long long>(base + 2 * kGamma),
        static_cast<long long>(base + 3 * kGamma));

    std::uint32_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256i hit = lt_u64(mix64_vec(state), thr);
        int mask = _mm256_movemask_pd(_mm256_castsi256_pd(hit));
        while (mask) { // hits are sparse at physical alpha
            int lane = __builtin_ctz(static_cast<unsigned>(mask));
            hits.push_back(i + static_cast<std::uint32_t>(lane));
            mask &= mask - 1;
        }
        state = _mm256_add_epi64(state, step);
    }
    for (std::uint64_t s = base + static_cast<std::uint64_t>(i) * kGamma; i < n; ++i, s += kGamma)
        if (mix64(s) < threshold) hits.push_back(i);
    return hits.size() - before;
}

} // namespace rti::kernels

#endif // RTI_HAVE_AVX2
