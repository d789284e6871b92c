#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "citemetrics/metrics.hpp"

namespace citemetrics {

enum class CorrelationMethod { pearson, spearman, kendall };

std::string method_name(CorrelationMethod m);
std::optional<CorrelationMethod> parse_method(std::string_view name);

struct CorrelationResult {
  CorrelationMethod method = CorrelationMethod::pearson;
  std::optional<double> value;
  std::size_t n = 0;  // sample size after pairwise-defined filtering
};

/// Pearson on raw values; Spearman as Pearson on mean ranks (ties averaged);
/// Kendall as tie-corrected tau-b. Undefined when n < 2 or either input is
/// constant. Throws on length mismatch.
CorrelationResult correlation(std::span<const double> x, std::span<const double> y,
                              CorrelationMethod method);

/// Same, dropping rows where either value is undefined first.
CorrelationResult correlation(std::span<const std::optional<double>> x,
                              std::span<const std::optional<double>> y, CorrelationMethod method);

/// Mean ranks, 1-based, ties averaged.
std::vector<double> average_ranks(std::span<const double> v);

struct BootstrapDistribution {
  std::vector<double> means;  // one entry per realization, realization order
  std::uint64_t seed = 0;
  double q025 = 0, median = 0, q975 = 0;
};

/// Each realization resamples |sample| values uniformly with replacement and
/// records the mean; realization r is seeded from (seed, r), so results are
/// reproducible and realization-parallel execution cannot change them.
BootstrapDistribution bootstrap_means(std::span<const double> sample, std::size_t realizations,
                                      std::uint64_t seed);

struct KsResult {
  double statistic = 0;
  double p_value = 1;
};

/// Two-sample Kolmogorov-Smirnov: sup |ECDF_a - ECDF_b| with the asymptotic
/// p-value at effective n = |a||b|/(|a|+|b|).
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Pearson of x against circular rotations of y by -max_shift..max_shift;
/// shift 0 reproduces the plain correlation. Requires |x| = |y| > 2*max_shift.
std::vector<std::pair<int, std::optional<double>>> pearson_shift_test(std::span<const double> x,
                                                                      std::span<const double> y,
                                                                      int max_shift);

struct YearlyCorrelationPoint {
  std::int32_t year = 0;
  CorrelationResult corr;
};
using YearlyCorrelations = std::vector<YearlyCorrelationPoint>;

/// Year-reshuffle surrogate: per trial, permute the publication-year labels
/// over rows (metric values untouched), regroup into yearly cohorts and
/// recompute the (c_w, d_w) correlation per cohort. Trial t is seeded from
/// (seed, t). Cohorts with fewer than min_cohort defined pairs report an
/// undefined value.
std::vector<YearlyCorrelations> reshuffle_years_surrogate(const MetricTable& table,
                                                          CorrelationMethod method,
                                                          std::size_t min_cohort,
                                                          std::uint64_t seed, std::size_t trials,
                                                          unsigned threads = 1);

}  // namespace citemetrics
