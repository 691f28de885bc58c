// Scale classification: is a lump of n micro-absorbers a detector? The
// criterion is the chance 1-(1-alpha)^n that at least one constituent
// confirms an incident offer. Pure functions of (alpha, n, thresholds).
#pragma once

#include <cstdint>
#include <string>

#include "rti/bigcount.hpp"

namespace rti {

enum class Regime { Micro, Meso, Macro };

std::string to_string(Regime r);

struct ScaleClass {
    Regime regime = Regime::Micro;
    double prob_cw = 0.0;          // 1 - (1-alpha)^n
    double prob_no_cw = 1.0;       // (1-alpha)^n, underflows to 0 for huge n
    double log10_prob_no_cw = 0.0; // exact in log space even when prob_no_cw == 0
};

struct ClassifierThresholds {
    double eps_macro = 1e-6;  // "virtually certain": prob_no_cw <= eps_macro
    double delta_micro = 0.05; // "extremely unlikely": prob_cw <= delta_micro
};

// Classifies a count of constituents. Requires 0 < delta_micro <
// 1 - eps_macro < 1 (InvalidThresholds) and a valid coupling (InvalidAlpha).
ScaleClass classify(const BigCount& n, double alpha = 0.007,
                    ClassifierThresholds thresholds = {});

// Smallest n with prob_cw(alpha, n) >= target. Closed-form candidate
// ceil(ln(1-target)/ln(1-alpha)) is checked exactly at n and n-1 so a
// rounding slip in the logs cannot shift the answer. Throws InvalidTarget
// unless target is in (0,1).
std::uint64_t threshold_count(double alpha, double target_prob_cw);

} // namespace rti
