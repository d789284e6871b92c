#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "citemetrics/graph.hpp"
#include "citemetrics/metrics.hpp"
#include "citemetrics/stats.hpp"

namespace citemetrics {

/// One cohort point: value undefined when the cohort is empty, degenerate, or
/// below the configured minimum size; n is the effective sample size.
struct YearPoint {
  std::int32_t year = 0;
  std::optional<double> value;
  std::size_t n = 0;
};
using YearSeries = std::vector<YearPoint>;

inline constexpr std::size_t kDefaultMinCohort = 30;

enum class MetricColumn { c_w, d_w, ref_count, ref_age, ref_popularity, ref_diversity };

std::string column_name(MetricColumn c);
std::optional<MetricColumn> parse_column(std::string_view name);
std::optional<double> column_value(const MetricRow& row, MetricColumn c);

/// Per publication year, correlation of (c_w, d_w) over rows where both are
/// defined; undefined below min_cohort. log1p_cw applies log1p to the c_w
/// side first (sensitivity analysis; rank methods are unaffected).
YearSeries yearly_correlation_series(const MetricTable& table, CorrelationMethod method,
                                     std::size_t min_cohort = kDefaultMinCohort,
                                     bool log1p_cw = false);

/// Same with (c_w, metric) for the reference-based originality metrics.
YearSeries metric_correlation_series(const MetricTable& table, MetricColumn metric,
                                     CorrelationMethod method,
                                     std::size_t min_cohort = kDefaultMinCohort,
                                     bool log1p_cw = false);

/// Branch selection for relative-citation splits: either by sign against a
/// threshold (e.g. d_w > 0 vs d_w < 0) or by within-year median halves of a
/// metric, ties resolved by (value, id).
struct SignSplit {
  MetricColumn metric = MetricColumn::d_w;
  double threshold = 0.0;
};
struct MedianSplit {
  MetricColumn metric = MetricColumn::ref_age;
};
using SplitSpec = std::variant<SignSplit, MedianSplit>;

struct RelativeCitationSeries {
  std::string high_label;  // "d_w>0" or "<metric>:upper"
  std::string low_label;
  YearSeries high;
  YearSeries low;
};

/// Per year, branch mean c_w divided by the mean c_w of all rows where the
/// split metric is defined that year.
RelativeCitationSeries relative_citation_series(const MetricTable& table, const SplitSpec& split);

/// Percentile band over [0, 100]; rows are ordered ascending by (c_w, id) and
/// the band keeps indexes [round(k*lo/100), round(k*hi/100)), so bands that
/// partition [0,100] slice each cohort exactly.
struct PercentileBand {
  double lo = 0.0;
  double hi = 100.0;
  std::string label;
};

struct StratumSeries {
  PercentileBand band;
  YearSeries mean_d;    // mean d_w over defined rows in the slice
  YearSeries frac_pos;  // fraction of defined rows with d_w > 0
};

std::vector<StratumSeries> disruption_by_impact_strata(const MetricTable& table,
                                                       std::span<const PercentileBand> bands);

struct EraDelta {
  PercentileBand band;
  std::optional<double> delta;  // late-era statistic minus early-era statistic
  std::size_t n_early = 0;
  std::size_t n_late = 0;
};

enum class EraStatistic { mean_d, frac_positive };

/// Percentile bins are assigned within each year, then pooled per era
/// (year <= early_cut vs year >= late_cut).
std::vector<EraDelta> era_deltas(const MetricTable& table, std::int32_t early_cut,
                                 std::int32_t late_cut, std::span<const PercentileBand> bands,
                                 EraStatistic statistic);

std::vector<PercentileBand> equal_percentile_bands(std::size_t count);

struct PrefAttachPoint {
  std::string id;
  std::int32_t year = 0;
  std::uint32_t dk_first = 0;
  std::uint32_t dk_second = 0;
};

struct PrefAttachResult {
  YearSeries correlation;  // per-year Pearson of (dk_first, dk_second)
  std::vector<PrefAttachPoint> scatter;
};

/// Windows must be disjoint; years whose second window is not fully covered
/// by the corpus report an undefined value. Zero-citation papers are
/// included: both deltas are plain counts.
PrefAttachResult preferential_attachment_series(const CitationGraph& graph,
                                                const TimeWindow& first_window,
                                                const TimeWindow& second_window);

/// Per year, the fraction of total c_w held by the ceil(top_fraction * n)
/// rows with the largest ranking key; ties resolved by (key desc, id asc).
YearSeries citation_share(const MetricTable& table, double top_fraction, MetricColumn by);

struct FieldBinStats {
  double size_lo = 0;  // inclusive
  double size_hi = 0;  // exclusive
  std::size_t n_fields = 0;
  std::size_t n_rows = 0;  // pooled rows (papers counted once per member field)
  CorrelationResult correlation;
  std::optional<double> rel_cit_high_d;
  std::optional<double> rel_cit_low_d;
  std::optional<double> share;
};

struct FieldStratification {
  std::vector<std::pair<std::string, std::size_t>> field_sizes;  // code -> member papers
  std::vector<FieldBinStats> bins;
};

/// Pools papers of all fields falling in each size bin (a paper contributes
/// once per field membership) and computes correlation(c_w, d_w), relative
/// citations of the d_w median halves, and the citation share of the
/// top fraction by c_w. Empty bin_edges selects power-of-two bins covering
/// the observed sizes.
FieldStratification field_stratification(const CitationGraph& graph, const MetricTable& table,
                                         std::span<const double> bin_edges = {},
                                         double top_fraction = 0.01,
                                         CorrelationMethod method = CorrelationMethod::pearson);

/// Paper count per publication year; gap years inside the range appear with
/// an explicit zero.
YearSeries papers_per_year(const CitationGraph& graph);

/// key,value,n rows; undefined values render as empty fields.
void write_year_series_csv(const YearSeries& series, std::ostream& out);
void write_year_series_csv(const YearSeries& series, const std::filesystem::path& path);

}  // namespace citemetrics
