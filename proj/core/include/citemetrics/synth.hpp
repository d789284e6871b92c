#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "citemetrics/corpus.hpp"

namespace citemetrics {

/// Per-year coupling strength, interpolated linearly from start (first
/// simulated year) to end (last simulated year).
struct BetaSchedule {
  double start = 0.0;
  double end = 0.0;

  double at(std::int32_t year, std::int32_t year_begin, std::int32_t year_end) const {
    if (year_end <= year_begin) return start;
    const double t = static_cast<double>(year - year_begin) /
                     static_cast<double>(year_end - year_begin);
    return start + (end - start) * t;
  }
};

struct GenConfig {
  std::int32_t year_begin = 1950;
  std::int32_t year_end = 2009;
  double initial_per_year = 50.0;  // papers in year_begin
  double growth = 0.05;            // count(y) = round(c0 * exp(growth * (y - y0)))
  /// Extra papers added to the first year: a pre-existing citable stock, so
  /// per-paper citation rates can rise as the yearly flow outgrows it.
  std::size_t initial_stock = 0;
  double refs_mean = 8.0;
  double refs_spread = 3.0;
  /// 0 = references may target all earlier papers; otherwise only papers of
  /// the last N years are eligible (keeps per-window citation flows, and with
  /// them the disruption denominator, stationary as the corpus grows).
  int ref_recency_years = 0;
  double attachment_mix = 0.5;  // probability a reference is chosen by in-degree
  /// Probability that picking a reference also pulls in one of that
  /// reference's own references (citers consolidating around prior work;
  /// raises the share of papers whose citers co-cite their references).
  double copy_prob = 0.0;
  BetaSchedule coupling;  // biases citation targeting by novelty rank
  int field_count = 20;
  double field_skew = 1.0;  // field k drawn with weight (k+1)^-skew
  std::uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Papers created year by year; references drawn from strictly earlier papers
/// via the attachment mixture, with selection weight multiplied by
/// exp(beta(y) * z) where z in [-1, 1] is the candidate's reference-diversity
/// percentile rank frozen at its own creation time. Deterministic for a
/// fixed seed.
std::vector<PaperRecord> generate_records(const GenConfig& config);

/// generate_records fed through the regular corpus build, so synthetic and
/// ingested corpora share one pipeline.
LoadResult generate(const GenConfig& config);

void write_records(std::span<const PaperRecord> records, std::ostream& out);
void write_records(std::span<const PaperRecord> records, const std::filesystem::path& path);

struct PlantedTruth {
  struct YearExpectation {
    std::int32_t year = 0;
    double beta = 0.0;
    int expected_sign = 0;  // sign of the planted yearly correlation(c_w, d_w)
  };
  std::vector<YearExpectation> years;

  std::string to_json() const;
};

/// The qualitative signature the analysis pipeline must recover from a
/// corpus generated with this config.
PlantedTruth planted_truth(const GenConfig& config);

}  // namespace citemetrics
