#include "rti/bigcount.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <limits>

#include "rti/errors.hpp"

namespace rti {

namespace {

[[noreturn]] void bad_count(const std::string& why) {
    throw SimError(ErrorCode::InvalidCount, "invalid count: " + why);
}

// Largest decimal length that surely fits: u128 max has 39 digits.
constexpr std::size_t kU128Digits = 39;
constexpr std::size_t kMaxTotalDigits = 301; // admits 1e300, keeps approx() finite

} // namespace

std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v > 0) {
        out.push_back(static_cast<char>('0' + static_cast<unsigned>(v % 10)));
        v /= 10;
    }
    std::reverse(out.begin(), out.end());
    return out;
}

BigCount::BigCount(std::uint64_t n) {
    digits_ = std::to_string(n);
    exp10_ = 0;
    finalize();
}

BigCount BigCount::parse(std::string_view text) {
    std::size_t pos = 0;
    auto peek = [&]() -> int { return pos < text.size() ? text[pos] : -1; };

    if (text.empty()) bad_count("empty string");
    if (peek() == '+' || peek() == '-') bad_count("signs are not accepted");

    std::string int_digits, frac_digits;
    while (std::isdigit(peek())) int_digits.push_back(text[pos++]);
    if (peek() == '.') {
        ++pos;
        while (std::isdigit(peek())) frac_digits.push_back(text[pos++]);
        if (frac_digits.empty()) bad_count("missing digits after decimal point");
    }
    if (int_digits.empty() && frac_digits.empty()) bad_count("no digits");

    long exponent = 0;
    if (peek() == 'e' || peek() == 'E') {
        ++pos;
        bool neg = false;
        if (peek() == '+') ++pos;
        else if (peek() == '-') { neg = true; ++pos; }
        if (!std::isdigit(peek())) bad_count("missing exponent digits");
        while (std::isdigit(peek())) {
            exponent = exponent * 10 + (text[pos++] - '0');
            if (exponent > 100000) bad_count("exponent out of range");
        }
        if (neg) exponent = -exponent;
    }
    if (pos != text.size()) bad_count("trailing characters");

    std::string digits = int_digits + frac_digits;
    long exp10 = exponent - static_cast<long>(frac_digits.size());

    // Strip leading zeros.
    std::size_t first = digits.find_first_not_of('0');
    if (first == std::string::npos) {
        BigCount zero;
        return zero;
    }
    digits.erase(0, first);

    // Negative powers of ten must cancel against trailing zeros, or the
    // value is not an integer.
    while (exp10 < 0) {
        if (digits.back() != '0') bad_count("not an integer");
        digits.pop_back();
        ++exp10;
        if (digits.empty()) return BigCount{};
    }
    // Canonical: no trailing zeros in the digit string.
    while (digits.size() > 1 && digits.back() == '0') {
        digits.pop_back();
        ++exp10;
    }

    if (digits.size() + static_cast<std::size_t>(exp10) > kMaxTotalDigits)
        bad_count("count exceeds 1e300");

    BigCount out;
    out.digits_ = digits;
    out.exp10_ = exp10;
    out.finalize();
    return out;
}

void BigCount::finalize() {
    // Exact value when the full expansion fits in 128 bits.
    exact_.reset();
    const std::size_t total = digits_ == "0" ? 1 : digits_.size() + static_cast<std::size_t>(exp10_);
    if (total <= kU128Digits + 1) {
        u128 acc = 0;
        bool overflow = false;
        const u128 max = ~static_cast<u128>(0);
        auto push_digit = [&](unsigned d) {
            if (acc > (max - d) / 10) { overflow = true; return; }
            acc = acc * 10 + d;
        };
        for (char c : digits_) {
            push_digit(static_cast<unsigned>(c - '0'));
            if (overflow) break;
        }
        for (long i = 0; i < exp10_ && !overflow; ++i) push_digit(0);
        if (!overflow) exact_ = acc;
    }

    if (exact_) {
        text_ = u128_to_string(*exact_);
    } else {
        text_ = digits_ + "e" + std::to_string(exp10_);
    }
    approx_ = std::strtod(text_.c_str(), nullptr);
}

u128 BigCount::as_u128() const {
    if (!exact_) throw SimError(ErrorCode::InvalidCount, "count does not fit in 128 bits: " + text_);
    return *exact_;
}

bool BigCount::fits_u64() const {
    return exact_ && *exact_ <= static_cast<u128>(std::numeric_limits<std::uint64_t>::max());
}

std::uint64_t BigCount::as_u64() const {
    if (!fits_u64()) throw SimError(ErrorCode::InvalidCount, "count does not fit in 64 bits: " + text_);
    return static_cast<std::uint64_t>(*exact_);
}

} // namespace rti
