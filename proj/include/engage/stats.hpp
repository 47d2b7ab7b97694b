#pragma once

// Two-sample comparisons: pooled-variance Student t (default), Welch t, and
// Cohen's d with the pooled standard deviation. Two-tailed p-values.

#include <cmath>
#include <limits>
#include <optional>
#include <span>

#include <boost/math/distributions/students_t.hpp>

#include "engage/error.hpp"

namespace engage::stats {

// Shifted by the first value so a constant sample returns that value exactly.
inline double mean(std::span<const double> x) {
    if (x.empty()) throw InsufficientData("mean of an empty sample");
    const double x0 = x.front();
    double d = 0.0;
    for (double v : x) d += v - x0;
    return x0 + d / static_cast<double>(x.size());
}

// Sample variance (n - 1 denominator); nullopt when n < 2.
inline std::optional<double> variance(std::span<const double> x) {
    if (x.size() < 2) return std::nullopt;
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

inline std::optional<double> stddev(std::span<const double> x) {
    auto v = variance(x);
    if (!v) return std::nullopt;
    return std::sqrt(*v);
}

struct TTest {
    double t = 0.0;
    double df = 0.0;
    double p = 1.0;
};

namespace detail {

inline void check_groups(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw InsufficientData("t-test needs at least two values per group");
    for (auto g : {a, b})
        for (double v : g)
            if (!std::isfinite(v)) throw DomainError("t-test input is not finite");
}

inline double two_tailed_p(double t, double df) {
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

// Zero standard error: equal means give t = 0, p = 1; otherwise the limit
// t = +-inf, p = 0.
inline TTest degenerate(double diff, double df) {
    if (diff == 0.0) return {0.0, df, 1.0};
    return {std::copysign(std::numeric_limits<double>::infinity(), diff), df, 0.0};
}

}  // namespace detail

inline double pooled_variance(std::span<const double> a, std::span<const double> b) {
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    return ((na - 1.0) * *variance(a) + (nb - 1.0) * *variance(b)) / (na + nb - 2.0);
}

inline TTest student_t(std::span<const double> a, std::span<const double> b) {
    detail::check_groups(a, b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double df = na + nb - 2.0;
    const double diff = mean(a) - mean(b);
    const double se = std::sqrt(pooled_variance(a, b) * (1.0 / na + 1.0 / nb));
    if (se == 0.0) return detail::degenerate(diff, df);
    const double t = diff / se;
    return {t, df, detail::two_tailed_p(t, df)};
}

inline TTest welch_t(std::span<const double> a, std::span<const double> b) {
    detail::check_groups(a, b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double va = *variance(a) / na, vb = *variance(b) / nb;
    const double diff = mean(a) - mean(b);
    const double se = std::sqrt(va + vb);
    if (se == 0.0) return detail::degenerate(diff, na + nb - 2.0);
    const double df = (va + vb) * (va + vb) / (va * va / (na - 1.0) + vb * vb / (nb - 1.0));
    const double t = diff / se;
    return {t, df, detail::two_tailed_p(t, df)};
}

// Positive when mean(a) > mean(b). Zero pooled SD: 0 for equal means,
// otherwise +-inf.
inline double cohens_d(std::span<const double> a, std::span<const double> b) {
    detail::check_groups(a, b);
    const double diff = mean(a) - mean(b);
    const double sd = std::sqrt(pooled_variance(a, b));
    if (sd == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    return diff / sd;
}

}  // namespace engage::stats
