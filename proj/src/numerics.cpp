#include "mmlp/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <vector>

#include "mmlp/errors.hpp"

namespace mmlp {

namespace {

constexpr double kLn2 = 0.6931471805599453094172321214581766;

// partition tables, grown lazily under a lock so concurrent cost evaluation
// stays safe. exact_[n] holds p(n) for n <= 120; log2_[n] holds log2 p(n)
// for every cached n.
struct PartitionTable {
    std::mutex mu;
    std::vector<std::uint64_t> exact{1}; // p(0) = 1
    std::vector<double> log2v{0.0};
    // p(n, k): partitions of n into parts <= k, computed as doubles; values
    // for n <= 120 are integers below 2^53 and therefore exact.
    std::vector<std::vector<double>> table{{1.0}};

    void grow(unsigned n) {
        std::lock_guard<std::mutex> lock(mu);
        if (n < log2v.size()) return;
        if (n > 2000) throw ResourceLimitError("partition argument too large: " + std::to_string(n));
        const unsigned old = static_cast<unsigned>(table.size());
        table.resize(n + 1);
        for (unsigned m = 0; m <= n; ++m) {
            auto& row = table[m];
            const unsigned from = (m < old) ? static_cast<unsigned>(row.size()) : 0;
            row.resize(n + 1);
            for (unsigned k = from; k <= n; ++k) {
                if (m == 0) {
                    row[k] = 1.0;
                } else if (k == 0) {
                    row[k] = 0.0;
                } else {
                    row[k] = table[m][k - 1] + (k <= m ? table[m - k][k] : 0.0);
                }
            }
        }
        for (unsigned m = static_cast<unsigned>(log2v.size()); m <= n; ++m) {
            const double p = table[m][m];
            log2v.push_back(std::log2(p));
            if (m <= 120) exact.push_back(static_cast<std::uint64_t>(p));
        }
    }
};

PartitionTable& partitions() {
    static PartitionTable t;
    return t;
}

} // namespace

double log2_factorial(std::uint64_t n) {
    return std::lgamma(static_cast<double>(n) + 1.0) / kLn2;
}

double log2_binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return -std::numeric_limits<double>::infinity();
    if (k == 0 || k == n) return 0.0;
    return log2_factorial(n) - log2_factorial(k) - log2_factorial(n - k);
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    unsigned __int128 acc = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        acc = acc * (n - k + i) / i; // divisible at every step
        if (acc > std::numeric_limits<std::uint64_t>::max())
            throw ResourceLimitError("binomial coefficient overflows uint64");
    }
    return static_cast<std::uint64_t>(acc);
}

std::uint64_t factorial_u64(std::uint64_t n) {
    if (n > 20) throw ResourceLimitError("factorial overflows uint64");
    std::uint64_t acc = 1;
    for (std::uint64_t i = 2; i <= n; ++i) acc *= i;
    return acc;
}

double log2_beta(double a, double b) {
    return (std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)) / kLn2;
}

double log2_sum_exp2(std::span<const double> xs) {
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : xs) hi = std::max(hi, x);
    if (!std::isfinite(hi)) return hi;
    double acc = 0.0;
    for (double x : xs) acc += std::exp2(x - hi);
    return hi + std::log2(acc);
}

std::uint64_t partition_count_u64(unsigned n) {
    if (n > 120) throw ResourceLimitError("exact partition count limited to n <= 120");
    auto& t = partitions();
    t.grow(n);
    std::lock_guard<std::mutex> lock(t.mu);
    return t.exact[n];
}

double log2_partition(unsigned n) {
    auto& t = partitions();
    t.grow(n);
    std::lock_guard<std::mutex> lock(t.mu);
    return t.log2v[n];
}

} // namespace mmlp
