// Transition-amplitude evaluation and the confirmation-probability algebra.
//
// The oscillatory integral over a finite interaction window is evaluated in
// the cancellation-free closed form tau * sinc(delta*tau/2) * phase, and the
// no-confirmation probability (1-alpha)^N is carried in log space so counts
// like 1e23 neither overflow nor lose their exponent.
#pragma once

#include <complex>
#include <cstdint>

#include "rti/bigcount.hpp"

namespace rti {

// Default coupling probability: the rounded fine-structure value used by all
// worked scenarios. The unrounded physical constant is available separately.
inline constexpr double kAlphaDefault = 0.007;
inline constexpr double kAlphaFineStructure = 1.0 / 137.035999;

struct CouplingConstant {
    double alpha = kAlphaDefault;
    constexpr CouplingConstant() = default;
    constexpr CouplingConstant(double a) : alpha(a) {} // implicit: alphas read naturally at call sites
};

// Throws SimError(InvalidAlpha) unless 0 < alpha <= 1. Unity coupling is
// admitted for forced-response tests; physical scenarios sit near 0.007.
void validate_coupling(CouplingConstant c);

enum class TransitionSign {
    Absorption, // quantum taken up: detuning = E_final - E_initial - omega
    Emission,   // quantum given off: detuning = E_final - E_initial + omega
};

struct TransitionParams {
    double matrix_element = 0.0; // coupling matrix element magnitude, supplied
    double e_initial = 0.0;
    double e_final = 0.0;
    double omega = 0.0;
    TransitionSign sign = TransitionSign::Absorption;
    double tau = 0.0; // interaction duration
};

// Angular rate of the integrand's phase; zero at resonance.
double detuning(const TransitionParams& p);

// c(tau) = -i * M * integral_0^tau exp(i*delta*t) dt, evaluated stably for
// all detunings including |delta*tau| below 1e-8.
std::complex<double> transition_amplitude(const TransitionParams& p);

struct TransitionProbability {
    double value;  // min(|c|^2, 1)
    bool clamped;  // true when first-order |c|^2 exceeded 1
};
TransitionProbability transition_probability(const TransitionParams& p);

struct NoCwProbability {
    double prob;       // (1-alpha)^n; 0.0 once the exponent underflows
    double log10_prob; // exact log10 regardless of underflow
};

// Probability that none of n independent constituents generates a
// confirmation. Throws SimError(InvalidAlpha) unless 0 < alpha <= 1.
NoCwProbability prob_no_cw(CouplingConstant alpha, const BigCount& n);
NoCwProbability prob_no_cw(CouplingConstant alpha, std::uint64_t n);

// 1 - (1-alpha)^n, evaluated with expm1 so tiny values keep full precision.
double prob_cw(CouplingConstant alpha, const BigCount& n);
double prob_cw(CouplingConstant alpha, std::uint64_t n);

} // namespace rti
