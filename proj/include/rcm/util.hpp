#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace rcm {

// Thrown when an input exceeds a documented enumeration/size cap.
// The CLI maps this to its own exit code, distinct from validation errors.
struct cap_exceeded : std::runtime_error {
    explicit cap_exceeded(const std::string& what) : std::runtime_error(what) {}
};

struct budget_exceeded : std::runtime_error {
    explicit budget_exceeded(const std::string& what) : std::runtime_error(what) {}
};

constexpr double neg_inf() { return -std::numeric_limits<double>::infinity(); }

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent RNG stream for (seed, stream index) pairs. Chains and sweep
// points derive their own stream so trial-level parallelism stays
// reproducible no matter the execution order.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream + 0x51ed2701)));
}

// Kahan compensated accumulator; cluster sums alternate in sign.
class kahan_sum {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

// Streaming log-sum-exp: log(sum_i exp(x_i)) without leaving log space.
class logsum_acc {
public:
    void add(double log_term) {
        if (log_term == neg_inf()) return;
        if (max_ == neg_inf()) {
            max_ = log_term;
            sum_ = 1.0;
            return;
        }
        if (log_term <= max_) {
            sum_ += std::exp(log_term - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        }
    }
    void merge(const logsum_acc& other) {
        if (other.max_ == neg_inf()) return;
        if (max_ == neg_inf()) {
            *this = other;
            return;
        }
        if (other.max_ <= max_) {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        }
    }
    double value() const { return max_ == neg_inf() ? neg_inf() : max_ + std::log(sum_); }

private:
    double max_ = neg_inf();
    double sum_ = 0.0;
};

inline double logsumexp2(double a, double b) {
    logsum_acc acc;
    acc.add(a);
    acc.add(b);
    return acc.value();
}

inline double logsumexp3(double a, double b, double c) {
    logsum_acc acc;
    acc.add(a);
    acc.add(b);
    acc.add(c);
    return acc.value();
}

}  // namespace rcm
