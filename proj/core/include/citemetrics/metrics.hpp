#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "citemetrics/graph.hpp"

namespace citemetrics {

/// Classification of the papers around a focal paper within one window.
/// only_focal + both equals the number of windowed citers.
struct DisruptionCounts {
  std::uint64_t only_focal = 0;  // citers citing focal but none of its references
  std::uint64_t both = 0;        // citers citing focal and at least one reference
  std::uint64_t subsequent = 0;  // window papers citing a reference but not focal
};

struct PaperMetrics {
  std::uint32_t c_w = 0;
  std::optional<double> d_w;
  std::uint32_t ref_count = 0;
  std::optional<double> ref_age;
  std::optional<double> ref_popularity;
  std::optional<double> ref_diversity;
};

std::uint32_t windowed_citations(const CitationGraph& g, PaperIndex focal, const TimeWindow& w);

DisruptionCounts disruption_counts(const CitationGraph& g, PaperIndex focal, const TimeWindow& w);

/// (only_focal - both) / (only_focal + both + subsequent). Undefined when the
/// focal paper has no metadata-backed references, no windowed citers, or the
/// denominator is zero.
std::optional<double> disruption(const CitationGraph& g, PaperIndex focal, const TimeWindow& w);

/// Mean publication-year gap to the references whose year is known.
std::optional<double> reference_age(const CitationGraph& g, PaperIndex focal);

/// Mean windowed citation count of the metadata-backed references, each
/// window anchored at the reference's own publication year.
std::optional<double> reference_popularity(const CitationGraph& g, PaperIndex focal,
                                           const TimeWindow& w);

/// Mean of 1/(1+n_ij) over unordered pairs of metadata-backed references,
/// where n_ij counts co-citing papers published before the focal paper.
/// Undefined with fewer than two such references.
std::optional<double> reference_diversity(const CitationGraph& g, PaperIndex focal);

PaperMetrics compute_paper_metrics(const CitationGraph& g, PaperIndex focal, const TimeWindow& w);

struct MetricFilters {
  std::uint32_t min_citations = 0;
  std::optional<std::pair<std::uint32_t, std::uint32_t>> refs_bin;  // inclusive
  std::optional<std::pair<std::int32_t, std::int32_t>> year_range;  // inclusive
};

struct MetricRow {
  std::string id;
  std::int32_t year = 0;
  PaperMetrics metrics;
};

struct MetricTable {
  TimeWindow window;
  MetricFilters filters;
  std::vector<MetricRow> rows;  // sorted by id
};

/// One row per metadata-backed paper passing the filters, sorted by id.
/// threads == 0 means hardware concurrency; output is identical for any
/// thread count.
MetricTable compute_metric_table(const CitationGraph& g, const TimeWindow& w,
                                 const MetricFilters& filters = {}, unsigned threads = 0);

/// CSV with header id,year,c_w,d_w,ref_count,ref_age,ref_popularity,ref_diversity;
/// undefined values render as empty fields.
void write_metric_csv(const MetricTable& table, std::ostream& out);
void write_metric_csv(const MetricTable& table, const std::filesystem::path& path);
MetricTable read_metric_csv(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering (used by every CSV writer).
std::string format_double(double v);

}  // namespace citemetrics
