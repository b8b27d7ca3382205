#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace kinstab {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit least_squares(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("least_squares needs >= 2 matched points");
    const double m = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= m;
    my /= m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares: abscissae are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    // a perfectly flat response is explained exactly
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

/// sup |F_n - F| against a continuous reference CDF.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf)
{
    if (samples.empty()) throw std::invalid_argument("ks_statistic needs samples");
    std::ranges::sort(samples);
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample needs samples");
    std::ranges::sort(a);
    std::ranges::sort(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

/// Asymptotic two-sample KS critical value c(a) sqrt((n+m)/(n m)).
inline double ks_critical_two_sample(double significance, std::size_t n, std::size_t m)
{
    const double c = std::sqrt(-0.5 * std::log(significance / 2.0));
    return c * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

/// Linear-interpolated quantile of unsorted data, q in [0,1].
inline double quantile(std::vector<double> data, double q)
{
    if (data.empty()) throw std::invalid_argument("quantile of empty data");
    std::ranges::sort(data);
    const double pos = q * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, data.size() - 1);
    return data[lo] + (pos - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

inline double median(std::vector<double> data) { return quantile(std::move(data), 0.5); }

inline double sample_stddev(std::span<const double> xs)
{
    if (xs.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

} // namespace kinstab
