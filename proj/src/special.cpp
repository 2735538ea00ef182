#include "lindblad_modes/special.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace lindblad {

namespace {

constexpr std::array<double, 21> kFactorials = [] {
    std::array<double, 21> f{};
    f[0] = 1.0;
    for (int i = 1; i <= 20; ++i) f[i] = f[i - 1] * i;
    return f;
}();

} // namespace

double log_factorial(int n) {
    if (n < 0) return std::numeric_limits<double>::quiet_NaN();
    if (n <= 20) return std::log(kFactorials[n]);
    return std::lgamma(n + 1.0);
}

double factorial(int n) {
    if (n < 0) return std::numeric_limits<double>::quiet_NaN();
    if (n <= 20) return kFactorials[n];
    return std::exp(std::lgamma(n + 1.0));
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (n <= 20) return kFactorials[n] / (kFactorials[k] * kFactorials[n - k]);
    return std::round(std::exp(log_factorial(n) - log_factorial(k) - log_factorial(n - k)));
}

} // namespace lindblad
