#include "rti/amplitudes.hpp"

#include <cmath>
#include <numbers>

#include "rti/errors.hpp"

namespace rti {

void validate_coupling(CouplingConstant c) {
    if (!(c.alpha > 0.0 && c.alpha <= 1.0))
        throw SimError(ErrorCode::InvalidAlpha,
                       "coupling probability must lie in (0, 1], got " + std::to_string(c.alpha));
}

double detuning(const TransitionParams& p) {
    const double base = p.e_final - p.e_initial;
    return p.sign == TransitionSign::Absorption ? base - p.omega : base + p.omega;
}

namespace {

// sin(x)/x with the quadratic series below 1e-8, where sin(x)/x is 1 to
// machine precision anyway.
double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

} // namespace

std::complex<double> transition_amplitude(const TransitionParams& p) {
    const double delta = detuning(p);
    const double half = 0.5 * delta * p.tau;
    // integral_0^tau exp(i*delta*t) dt = exp(i*half) * tau * sinc(half).
    // This form has no subtractive cancellation near resonance.
    const double magnitude = p.tau * sinc(half);
    const std::complex<double> phase{std::cos(half), std::sin(half)};
    return std::complex<double>{0.0, -1.0} * p.matrix_element * magnitude * phase;
}

TransitionProbability transition_probability(const TransitionParams& p) {
    const std::complex<double> c = transition_amplitude(p);
    const double sq = std::norm(c);
    if (sq > 1.0) return {1.0, true};
    return {sq, false};
}

NoCwProbability prob_no_cw(CouplingConstant alpha, const BigCount& n) {
    validate_coupling(alpha);
    if (n.is_zero()) return {1.0, 0.0}; // also dodges 0 * -inf at alpha = 1
    const double ln_keep = std::log1p(-alpha.alpha); // ln(1 - alpha), exact for small alpha
    const double t = n.approx() * ln_keep;
    return {std::exp(t), t / std::numbers::ln10};
}

NoCwProbability prob_no_cw(CouplingConstant alpha, std::uint64_t n) {
    return prob_no_cw(alpha, BigCount{n});
}

double prob_cw(CouplingConstant alpha, const BigCount& n) {
    validate_coupling(alpha);
    if (n.is_zero()) return 0.0;
    const double t = n.approx() * std::log1p(-alpha.alpha);
    return -std::expm1(t);
}

double prob_cw(CouplingConstant alpha, std::uint64_t n) {
    return prob_cw(alpha, BigCount{n});
}

} // namespace rti
