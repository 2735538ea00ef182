#pragma once

// Factorial helpers. Exact up to 20!, log-gamma beyond.

namespace lindblad {

double log_factorial(int n);

// n! as a double; overflows to +inf above 170.
double factorial(int n);

// Binomial coefficient C(n, k), 0 when k is outside [0, n].
double binomial(int n, int k);

} // namespace lindblad
