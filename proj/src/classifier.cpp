#include "rti/classifier.hpp"

#include <cmath>

#include "rti/amplitudes.hpp"
#include "rti/errors.hpp"

namespace rti {

std::string to_string(Regime r) {
    switch (r) {
    case Regime::Micro: return "micro";
    case Regime::Meso: return "meso";
    case Regime::Macro: return "macro";
    }
    return "?";
}

ScaleClass classify(const BigCount& n, double alpha, ClassifierThresholds thresholds) {
    validate_coupling(alpha);
    // In real arithmetic the constraint is 0 < delta_micro < 1 - eps_macro < 1.
    // Testing `1 - eps < 1` in doubles would outlaw eps below 1 ulp, which is
    // exactly where the log-space macro test earns its keep, so the last leg
    // is expressed as eps < 1 instead.
    if (!(thresholds.eps_macro > 0.0) || !(thresholds.eps_macro < 1.0) ||
        !(thresholds.delta_micro > 0.0) ||
        !(thresholds.delta_micro < 1.0 - thresholds.eps_macro)) {
        throw SimError(ErrorCode::InvalidThresholds,
                       "need 0 < delta_micro < 1 - eps_macro < 1");
    }

    ScaleClass out;
    if (n.is_zero()) {
        // Nothing to respond: certainly silent.
        out.regime = Regime::Micro;
        out.prob_cw = 0.0;
        out.prob_no_cw = 1.0;
        out.log10_prob_no_cw = 0.0;
        return out;
    }

    const NoCwProbability silent = prob_no_cw(alpha, n);
    out.prob_no_cw = silent.prob;
    out.log10_prob_no_cw = silent.log10_prob;
    out.prob_cw = prob_cw(alpha, n);

    // Classify in log space so 10^23 constituents do not depend on a
    // probability that has underflowed to zero.
    const double log10_eps = std::log10(thresholds.eps_macro);
    if (out.log10_prob_no_cw <= log10_eps) {
        out.regime = Regime::Macro;
    } else if (out.prob_cw <= thresholds.delta_micro) {
        out.regime = Regime::Micro;
    } else {
        out.regime = Regime::Meso;
    }
    return out;
}

std::uint64_t threshold_count(double alpha, double target_prob_cw) {
    validate_coupling(alpha);
    if (!(target_prob_cw > 0.0) || !(target_prob_cw < 1.0)) {
        throw SimError(ErrorCode::InvalidTarget, "target probability must lie in (0,1)");
    }
    // prob_cw(n) >= t  <=>  n * ln(1-alpha) <= ln(1-t).
    const double raw = std::log1p(-target_prob_cw) / std::log1p(-alpha);
    auto reaches = [&](std::uint64_t n) { return prob_cw(alpha, BigCount(n)) >= target_prob_cw; };
    std::uint64_t n = raw <= 1.0 ? 1 : static_cast<std::uint64_t>(std::ceil(raw));
    // The logs can land the candidate one off in either direction; settle it
    // with the actual probability.
    while (!reaches(n)) ++n;
    while (n > 1 && reaches(n - 1)) --n;
    return n;
}

} // namespace rti
