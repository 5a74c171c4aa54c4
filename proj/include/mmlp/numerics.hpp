#pragma once

#include <cstdint>
#include <span>

namespace mmlp {

// All code lengths in this library are bits, so every helper here works in
// base-2 logarithms.

double log2_factorial(std::uint64_t n);

// log2 C(n, k); -inf when k > n.
double log2_binomial(std::uint64_t n, std::uint64_t k);

// Exact binomial coefficient; throws ResourceLimitError on uint64 overflow.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

// Exact factorial for n <= 20; throws ResourceLimitError beyond.
std::uint64_t factorial_u64(std::uint64_t n);

// log2 of the beta function B(a, b), via log-gamma.
double log2_beta(double a, double b);

// log2(sum_i 2^x_i), stable for widely spread exponents.
double log2_sum_exp2(std::span<const double> xs);

// Number of unrestricted integer partitions of n. Exact (uint64) for
// n <= 120; larger n would overflow and throws ResourceLimitError.
std::uint64_t partition_count_u64(unsigned n);

// log2 partition(n). Exact table up to 120, floating-point recurrence above.
double log2_partition(unsigned n);

} // namespace mmlp
