#include "citemetrics/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "citemetrics/corpus.hpp"

namespace citemetrics {

std::string column_name(MetricColumn c) {
  switch (c) {
    case MetricColumn::c_w: return "c_w";
    case MetricColumn::d_w: return "d_w";
    case MetricColumn::ref_count: return "ref_count";
    case MetricColumn::ref_age: return "ref_age";
    case MetricColumn::ref_popularity: return "ref_popularity";
    case MetricColumn::ref_diversity: return "ref_diversity";
  }
  return "c_w";
}

std::optional<MetricColumn> parse_column(std::string_view name) {
  if (name == "c_w") return MetricColumn::c_w;
  if (name == "d_w") return MetricColumn::d_w;
  if (name == "ref_count") return MetricColumn::ref_count;
  if (name == "ref_age") return MetricColumn::ref_age;
  if (name == "ref_popularity") return MetricColumn::ref_popularity;
  if (name == "ref_diversity") return MetricColumn::ref_diversity;
  return std::nullopt;
}

std::optional<double> column_value(const MetricRow& row, MetricColumn c) {
  switch (c) {
    case MetricColumn::c_w: return static_cast<double>(row.metrics.c_w);
    case MetricColumn::d_w: return row.metrics.d_w;
    case MetricColumn::ref_count: return static_cast<double>(row.metrics.ref_count);
    case MetricColumn::ref_age: return row.metrics.ref_age;
    case MetricColumn::ref_popularity: return row.metrics.ref_popularity;
    case MetricColumn::ref_diversity: return row.metrics.ref_diversity;
  }
  return std::nullopt;
}

namespace {

using RowIndex = std::size_t;

std::map<std::int32_t, std::vector<RowIndex>> rows_by_year(const MetricTable& table) {
  std::map<std::int32_t, std::vector<RowIndex>> cohorts;
  for (RowIndex i = 0; i < table.rows.size(); ++i) {
    cohorts[table.rows[i].year].push_back(i);
  }
  return cohorts;
}

YearSeries correlation_series_impl(const MetricTable& table, MetricColumn cx, MetricColumn cy,
                                   CorrelationMethod method, std::size_t min_cohort,
                                   bool log1p_cw) {
  YearSeries series;
  for (const auto& [year, rows] : rows_by_year(table)) {
    std::vector<double> xs, ys;
    xs.reserve(rows.size());
    ys.reserve(rows.size());
    for (RowIndex i : rows) {
      auto x = column_value(table.rows[i], cx);
      auto y = column_value(table.rows[i], cy);
      if (log1p_cw) {
        if (cx == MetricColumn::c_w && x) x = std::log1p(*x);
        if (cy == MetricColumn::c_w && y) y = std::log1p(*y);
      }
      if (x && y) {
        xs.push_back(*x);
        ys.push_back(*y);
      }
    }
    CorrelationResult corr = correlation(xs, ys, method);
    YearPoint point{year, corr.value, corr.n};
    if (corr.n < min_cohort) point.value = std::nullopt;
    series.push_back(point);
  }
  return series;
}

/// Indexes of `rows` ordered ascending by (column, id); rows with the column
/// undefined are excluded.
std::vector<RowIndex> order_by_column(const MetricTable& table, std::span<const RowIndex> rows,
                                      MetricColumn column) {
  std::vector<RowIndex> order;
  order.reserve(rows.size());
  for (RowIndex i : rows) {
    if (column_value(table.rows[i], column)) order.push_back(i);
  }
  std::sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
    const double va = *column_value(table.rows[a], column);
    const double vb = *column_value(table.rows[b], column);
    if (va != vb) return va < vb;
    return table.rows[a].id < table.rows[b].id;
  });
  return order;
}

std::size_t band_cut(std::size_t k, double pct) {
  const double pos = static_cast<double>(k) * pct / 100.0;
  auto cut = static_cast<std::size_t>(std::llround(pos));
  return std::min(cut, k);
}

double mean_c_w(const MetricTable& table, std::span<const RowIndex> rows) {
  double sum = 0.0;
  for (RowIndex i : rows) sum += static_cast<double>(table.rows[i].metrics.c_w);
  return rows.empty() ? 0.0 : sum / static_cast<double>(rows.size());
}

}  // namespace

YearSeries yearly_correlation_series(const MetricTable& table, CorrelationMethod method,
                                     std::size_t min_cohort, bool log1p_cw) {
  return correlation_series_impl(table, MetricColumn::c_w, MetricColumn::d_w, method, min_cohort,
                                 log1p_cw);
}

YearSeries metric_correlation_series(const MetricTable& table, MetricColumn metric,
                                     CorrelationMethod method, std::size_t min_cohort,
                                     bool log1p_cw) {
  return correlation_series_impl(table, MetricColumn::c_w, metric, method, min_cohort, log1p_cw);
}

RelativeCitationSeries relative_citation_series(const MetricTable& table, const SplitSpec& split) {
  RelativeCitationSeries result;
  const MetricColumn column =
      std::holds_alternative<SignSplit>(split) ? std::get<SignSplit>(split).metric
                                               : std::get<MedianSplit>(split).metric;
  if (const auto* sign = std::get_if<SignSplit>(&split)) {
    const std::string t = format_double(sign->threshold);
    result.high_label = column_name(column) + ">" + t;
    result.low_label = column_name(column) + "<" + t;
  } else {
    result.high_label = column_name(column) + ":upper";
    result.low_label = column_name(column) + ":lower";
  }

  for (const auto& [year, rows] : rows_by_year(table)) {
    std::vector<RowIndex> defined;
    for (RowIndex i : rows) {
      if (column_value(table.rows[i], column)) defined.push_back(i);
    }
    std::vector<RowIndex> high, low;
    if (const auto* sign = std::get_if<SignSplit>(&split)) {
      for (RowIndex i : defined) {
        const double v = *column_value(table.rows[i], column);
        if (v > sign->threshold) high.push_back(i);
        else if (v < sign->threshold) low.push_back(i);
      }
    } else {
      auto order = order_by_column(table, defined, column);
      const std::size_t half = order.size() / 2;
      low.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(half));
      high.assign(order.begin() + static_cast<std::ptrdiff_t>(half), order.end());
    }

    const double denom = mean_c_w(table, defined);
    auto point = [&](const std::vector<RowIndex>& branch) {
      YearPoint p{year, std::nullopt, branch.size()};
      if (!branch.empty() && denom > 0.0) p.value = mean_c_w(table, branch) / denom;
      return p;
    };
    result.high.push_back(point(high));
    result.low.push_back(point(low));
  }
  return result;
}

std::vector<PercentileBand> equal_percentile_bands(std::size_t count) {
  std::vector<PercentileBand> bands;
  bands.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PercentileBand b;
    b.lo = 100.0 * static_cast<double>(i) / static_cast<double>(count);
    b.hi = 100.0 * static_cast<double>(i + 1) / static_cast<double>(count);
    b.label = "p" + format_double(b.lo) + "-" + format_double(b.hi);
    bands.push_back(std::move(b));
  }
  return bands;
}

std::vector<StratumSeries> disruption_by_impact_strata(const MetricTable& table,
                                                       std::span<const PercentileBand> bands) {
  std::vector<StratumSeries> result;
  result.reserve(bands.size());
  for (const auto& band : bands) result.push_back({band, {}, {}});

  for (const auto& [year, rows] : rows_by_year(table)) {
    // Percentiles rank the whole cohort by (c_w, id); statistics then run
    // over the defined d_w rows inside each slice.
    std::vector<RowIndex> order(rows.begin(), rows.end());
    std::sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
      if (table.rows[a].metrics.c_w != table.rows[b].metrics.c_w)
        return table.rows[a].metrics.c_w < table.rows[b].metrics.c_w;
      return table.rows[a].id < table.rows[b].id;
    });
    const std::size_t k = order.size();
    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
      const std::size_t begin = band_cut(k, bands[bi].lo);
      const std::size_t end = std::max(band_cut(k, bands[bi].hi), begin);
      double d_sum = 0.0;
      std::size_t defined = 0, positive = 0;
      for (std::size_t i = begin; i < end; ++i) {
        const auto& d = table.rows[order[i]].metrics.d_w;
        if (!d) continue;
        ++defined;
        d_sum += *d;
        if (*d > 0.0) ++positive;
      }
      YearPoint mean{year, std::nullopt, defined};
      YearPoint frac{year, std::nullopt, defined};
      if (defined > 0) {
        mean.value = d_sum / static_cast<double>(defined);
        frac.value = static_cast<double>(positive) / static_cast<double>(defined);
      }
      result[bi].mean_d.push_back(mean);
      result[bi].frac_pos.push_back(frac);
    }
  }
  return result;
}

std::vector<EraDelta> era_deltas(const MetricTable& table, std::int32_t early_cut,
                                 std::int32_t late_cut, std::span<const PercentileBand> bands,
                                 EraStatistic statistic) {
  if (early_cut >= late_cut) {
    throw std::invalid_argument("era_deltas: early_cut must be less than late_cut");
  }

  struct Accumulator {
    double sum = 0.0;
    std::size_t positive = 0;
    std::size_t n = 0;
  };
  std::vector<Accumulator> early(bands.size()), late(bands.size());

  for (const auto& [year, rows] : rows_by_year(table)) {
    const bool is_early = year <= early_cut;
    const bool is_late = year >= late_cut;
    if (!is_early && !is_late) continue;
    std::vector<RowIndex> order(rows.begin(), rows.end());
    std::sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
      if (table.rows[a].metrics.c_w != table.rows[b].metrics.c_w)
        return table.rows[a].metrics.c_w < table.rows[b].metrics.c_w;
      return table.rows[a].id < table.rows[b].id;
    });
    const std::size_t k = order.size();
    for (std::size_t bi = 0; bi < bands.size(); ++bi) {
      const std::size_t begin = band_cut(k, bands[bi].lo);
      const std::size_t end = std::max(band_cut(k, bands[bi].hi), begin);
      auto& acc = is_early ? early[bi] : late[bi];
      for (std::size_t i = begin; i < end; ++i) {
        const auto& d = table.rows[order[i]].metrics.d_w;
        if (!d) continue;
        acc.sum += *d;
        if (*d > 0.0) ++acc.positive;
        ++acc.n;
      }
    }
  }

  std::vector<EraDelta> deltas;
  deltas.reserve(bands.size());
  for (std::size_t bi = 0; bi < bands.size(); ++bi) {
    EraDelta d;
    d.band = bands[bi];
    d.n_early = early[bi].n;
    d.n_late = late[bi].n;
    if (early[bi].n > 0 && late[bi].n > 0) {
      auto value = [&](const Accumulator& acc) {
        if (statistic == EraStatistic::mean_d) return acc.sum / static_cast<double>(acc.n);
        return static_cast<double>(acc.positive) / static_cast<double>(acc.n);
      };
      d.delta = value(late[bi]) - value(early[bi]);
    }
    deltas.push_back(std::move(d));
  }
  return deltas;
}

PrefAttachResult preferential_attachment_series(const CitationGraph& graph,
                                                const TimeWindow& first_window,
                                                const TimeWindow& second_window) {
  if (!first_window.valid() || !second_window.valid()) {
    throw std::invalid_argument("preferential_attachment_series: invalid window");
  }
  if (first_window.overlaps(second_window)) {
    throw std::invalid_argument("preferential_attachment_series: windows overlap");
  }

  PrefAttachResult result;
  if (graph.corpus_size() == 0) return result;
  const auto [min_year, max_year] = graph.year_range();
  (void)min_year;

  const int tail =
      std::max(first_window.offset + first_window.length, second_window.offset + second_window.length) - 1;

  for (const auto& [year, papers] : graph.papers_by_year()) {
    std::vector<double> dk1, dk2;
    dk1.reserve(papers.size());
    dk2.reserve(papers.size());

    std::vector<PaperIndex> ordered(papers.begin(), papers.end());
    std::sort(ordered.begin(), ordered.end(),
              [&](PaperIndex a, PaperIndex b) { return graph.id(a) < graph.id(b); });
    for (PaperIndex p : ordered) {
      const std::uint32_t first = windowed_citations(graph, p, first_window);
      const std::uint32_t second = windowed_citations(graph, p, second_window);
      dk1.push_back(static_cast<double>(first));
      dk2.push_back(static_cast<double>(second));
      result.scatter.push_back({graph.id(p), year, first, second});
    }

    YearPoint point{year, std::nullopt, papers.size()};
    if (year + tail <= max_year) {
      point.value = correlation(dk1, dk2, CorrelationMethod::pearson).value;
    }
    result.correlation.push_back(point);
  }
  return result;
}

YearSeries citation_share(const MetricTable& table, double top_fraction, MetricColumn by) {
  if (!(top_fraction > 0.0) || !(top_fraction < 1.0)) {
    throw std::invalid_argument("citation_share: top_fraction must lie in (0, 1)");
  }

  YearSeries series;
  for (const auto& [year, rows] : rows_by_year(table)) {
    std::vector<RowIndex> order;
    for (RowIndex i : rows) {
      if (column_value(table.rows[i], by)) order.push_back(i);
    }
    std::sort(order.begin(), order.end(), [&](RowIndex a, RowIndex b) {
      const double va = *column_value(table.rows[a], by);
      const double vb = *column_value(table.rows[b], by);
      if (va != vb) return va > vb;
      return table.rows[a].id < table.rows[b].id;
    });

    YearPoint point{year, std::nullopt, order.size()};
    if (!order.empty()) {
      double total = 0.0;
      for (RowIndex i : order) total += static_cast<double>(table.rows[i].metrics.c_w);
      const auto top =
          static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(order.size())));
      double top_sum = 0.0;
      for (std::size_t i = 0; i < top && i < order.size(); ++i) {
        top_sum += static_cast<double>(table.rows[order[i]].metrics.c_w);
      }
      if (total > 0.0) point.value = top_sum / total;
    }
    series.push_back(point);
  }
  return series;
}

FieldStratification field_stratification(const CitationGraph& graph, const MetricTable& table,
                                         std::span<const double> bin_edges, double top_fraction,
                                         CorrelationMethod method) {
  FieldStratification result;

  // Member rows per field code, via the id -> row map.
  std::unordered_map<std::string_view, RowIndex> row_of;
  row_of.reserve(table.rows.size());
  for (RowIndex i = 0; i < table.rows.size(); ++i) row_of.emplace(table.rows[i].id, i);

  const auto& code_names = graph.field_code_names();
  std::vector<std::vector<RowIndex>> members(code_names.size());
  std::vector<std::size_t> sizes(code_names.size(), 0);
  for (PaperIndex p = 0; p < graph.node_count(); ++p) {
    if (!graph.in_corpus(p)) continue;
    for (std::uint32_t code : graph.field_codes(p)) {
      ++sizes[code];
      auto it = row_of.find(graph.id(p));
      if (it != row_of.end()) members[code].push_back(it->second);
    }
  }

  std::vector<std::size_t> code_order(code_names.size());
  std::iota(code_order.begin(), code_order.end(), 0);
  std::sort(code_order.begin(), code_order.end(),
            [&](std::size_t a, std::size_t b) { return code_names[a] < code_names[b]; });
  for (std::size_t c : code_order) {
    if (sizes[c] > 0) result.field_sizes.emplace_back(code_names[c], sizes[c]);
  }
  if (result.field_sizes.empty()) return result;

  std::vector<double> edges(bin_edges.begin(), bin_edges.end());
  if (edges.empty()) {
    std::size_t max_size = 0;
    for (const auto& [code, size] : result.field_sizes) max_size = std::max(max_size, size);
    double edge = 1.0;
    while (true) {
      edges.push_back(edge);
      if (edge > static_cast<double>(max_size)) break;
      edge *= 2.0;
    }
  }
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw std::invalid_argument("field_stratification: need >= 2 ascending bin edges");
  }

  for (std::size_t b = 0; b + 1 < edges.size(); ++b) {
    FieldBinStats stats;
    stats.size_lo = edges[b];
    stats.size_hi = edges[b + 1];

    std::vector<RowIndex> pool;
    for (std::size_t c : code_order) {
      const auto s = static_cast<double>(sizes[c]);
      if (sizes[c] == 0 || s < stats.size_lo || s >= stats.size_hi) continue;
      ++stats.n_fields;
      pool.insert(pool.end(), members[c].begin(), members[c].end());
    }
    stats.n_rows = pool.size();

    if (!pool.empty()) {
      std::vector<double> xs, ys;
      for (RowIndex i : pool) {
        const auto& row = table.rows[i];
        if (row.metrics.d_w) {
          xs.push_back(static_cast<double>(row.metrics.c_w));
          ys.push_back(*row.metrics.d_w);
        }
      }
      stats.correlation = correlation(xs, ys, method);

      // Median split of the pooled rows by (d_w, id).
      std::vector<RowIndex> defined;
      for (RowIndex i : pool)
        if (table.rows[i].metrics.d_w) defined.push_back(i);
      std::sort(defined.begin(), defined.end(), [&](RowIndex a, RowIndex b) {
        const double da = *table.rows[a].metrics.d_w;
        const double db = *table.rows[b].metrics.d_w;
        if (da != db) return da < db;
        return table.rows[a].id < table.rows[b].id;
      });
      const std::size_t half = defined.size() / 2;
      const std::span<const RowIndex> low(defined.data(), half);
      const std::span<const RowIndex> high(defined.data() + half, defined.size() - half);
      const double denom = mean_c_w(table, defined);
      if (denom > 0.0 && !high.empty()) stats.rel_cit_high_d = mean_c_w(table, high) / denom;
      if (denom > 0.0 && !low.empty()) stats.rel_cit_low_d = mean_c_w(table, low) / denom;

      std::vector<RowIndex> by_c(pool);
      std::sort(by_c.begin(), by_c.end(), [&](RowIndex a, RowIndex b) {
        if (table.rows[a].metrics.c_w != table.rows[b].metrics.c_w)
          return table.rows[a].metrics.c_w > table.rows[b].metrics.c_w;
        return table.rows[a].id < table.rows[b].id;
      });
      double total = 0.0;
      for (RowIndex i : by_c) total += static_cast<double>(table.rows[i].metrics.c_w);
      const auto top =
          static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(by_c.size())));
      double top_sum = 0.0;
      for (std::size_t i = 0; i < top && i < by_c.size(); ++i) {
        top_sum += static_cast<double>(table.rows[by_c[i]].metrics.c_w);
      }
      if (total > 0.0) stats.share = top_sum / total;
    }
    result.bins.push_back(std::move(stats));
  }
  return result;
}

YearSeries papers_per_year(const CitationGraph& graph) {
  YearSeries series;
  const auto& index = graph.papers_by_year();
  if (index.empty()) return series;
  const std::int32_t lo = index.begin()->first;
  const std::int32_t hi = index.rbegin()->first;
  for (std::int32_t y = lo; y <= hi; ++y) {
    auto it = index.find(y);
    const std::size_t count = it == index.end() ? 0 : it->second.size();
    series.push_back({y, static_cast<double>(count), count});
  }
  return series;
}

void write_year_series_csv(const YearSeries& series, std::ostream& out) {
  out << "key,value,n\n";
  for (const YearPoint& p : series) {
    out << p.year << ',';
    if (p.value) out << format_double(*p.value);
    out << ',' << p.n << '\n';
  }
}

void write_year_series_csv(const YearSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_year_series_csv(series, out);
  if (!out) throw IoError("write failure: " + path.string());
}

}  // namespace citemetrics
