// Nonnegative integer counts that may exceed machine range (e.g. "1e23"
// detector constituents). Stores a canonical decimal form plus exact
// 128-bit value when one exists.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "rti/rng.hpp"

namespace rti {

class BigCount {
public:
    BigCount() = default; // zero
    BigCount(std::uint64_t n); // NOLINT: implicit by design, counts are ints

    // Accepts plain digits ("60"), decimals that are whole numbers ("2.5e10"),
    // and scientific notation ("1e23"). Throws SimError(InvalidCount) on
    // signs, fractional values, or counts above 1e300.
    static BigCount parse(std::string_view text);

    bool is_zero() const { return digits_ == "0"; }
    // Closest double; exact when the count fits in 53 bits.
    double approx() const { return approx_; }

    bool fits_u128() const { return exact_.has_value(); }
    u128 as_u128() const; // throws unless fits_u128()
    bool fits_u64() const;
    std::uint64_t as_u64() const;

    // Canonical decimal text: full digits when the value fits in 128 bits,
    // otherwise "<digits>e<exp>" with no trailing zeros in the digits.
    const std::string& text() const { return text_; }

    bool operator==(const BigCount& other) const { return text_ == other.text_; }
    bool operator!=(const BigCount& other) const { return !(*this == other); }

private:
    std::string digits_ = "0"; // no leading/trailing zeros (except "0" itself)
    long exp10_ = 0;           // value = digits * 10^exp10
    std::string text_ = "0";
    double approx_ = 0.0;
    std::optional<u128> exact_ = static_cast<u128>(0);

    void finalize();
};

std::string u128_to_string(u128 v);

} // namespace rti
