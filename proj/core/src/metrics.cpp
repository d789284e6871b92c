#include "citemetrics/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "citemetrics/corpus.hpp"

namespace citemetrics {

namespace {

/// Scratch buffers reused across papers in the batch computation.
struct Workspace {
  std::vector<PaperIndex> citers;       // windowed citers of the focal paper
  std::vector<PaperIndex> corpus_refs;  // metadata-backed references
  std::vector<PaperIndex> subsequent;
  std::vector<std::vector<PaperIndex>> filtered_citers;  // per-ref, pre-cut by year
};

void collect_windowed_citers(const CitationGraph& g, PaperIndex focal, const TimeWindow& w,
                             std::vector<PaperIndex>& out) {
  out.clear();
  const std::int32_t y = g.year(focal);
  if (y == kUnknownYear) return;
  for (PaperIndex q : g.citers(focal)) {
    const std::int32_t qy = g.year(q);
    if (qy != kUnknownYear && w.contains(y, qy)) out.push_back(q);
  }
}

void collect_corpus_refs(const CitationGraph& g, PaperIndex focal, std::vector<PaperIndex>& out) {
  out.clear();
  for (PaperIndex r : g.references(focal)) {
    if (g.in_corpus(r)) out.push_back(r);
  }
}

bool intersects_sorted(std::span<const PaperIndex> a, std::span<const PaperIndex> b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      return true;
    }
  }
  return false;
}

std::size_t count_common_sorted(std::span<const PaperIndex> a, std::span<const PaperIndex> b) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

DisruptionCounts disruption_counts_ws(const CitationGraph& g, PaperIndex focal,
                                      const TimeWindow& w, Workspace& ws) {
  DisruptionCounts counts;
  collect_windowed_citers(g, focal, w, ws.citers);
  collect_corpus_refs(g, focal, ws.corpus_refs);

  for (PaperIndex c : ws.citers) {
    if (intersects_sorted(g.references(c), ws.corpus_refs)) {
      ++counts.both;
    } else {
      ++counts.only_focal;
    }
  }

  ws.subsequent.clear();
  const std::int32_t y = g.year(focal);
  auto focal_citers = g.citers(focal);
  for (PaperIndex r : ws.corpus_refs) {
    for (PaperIndex q : g.citers(r)) {
      const std::int32_t qy = g.year(q);
      if (qy == kUnknownYear || !w.contains(y, qy)) continue;
      if (q == focal) continue;
      if (std::binary_search(focal_citers.begin(), focal_citers.end(), q)) continue;
      ws.subsequent.push_back(q);
    }
  }
  std::sort(ws.subsequent.begin(), ws.subsequent.end());
  counts.subsequent = static_cast<std::uint64_t>(
      std::unique(ws.subsequent.begin(), ws.subsequent.end()) - ws.subsequent.begin());
  return counts;
}

std::optional<double> disruption_from_counts(const DisruptionCounts& counts, bool has_refs) {
  const std::uint64_t citers = counts.only_focal + counts.both;
  const std::uint64_t denom = citers + counts.subsequent;
  if (!has_refs || citers == 0 || denom == 0) return std::nullopt;
  return (static_cast<double>(counts.only_focal) - static_cast<double>(counts.both)) /
         static_cast<double>(denom);
}

std::optional<double> reference_diversity_ws(const CitationGraph& g, PaperIndex focal,
                                             Workspace& ws) {
  collect_corpus_refs(g, focal, ws.corpus_refs);
  const std::size_t r = ws.corpus_refs.size();
  if (r < 2) return std::nullopt;

  // Cut each reference's citer list to papers published before the focal
  // paper once, then intersect the shortened lists pairwise.
  const std::int32_t y = g.year(focal);
  if (ws.filtered_citers.size() < r) ws.filtered_citers.resize(r);
  for (std::size_t i = 0; i < r; ++i) {
    auto& dst = ws.filtered_citers[i];
    dst.clear();
    for (PaperIndex q : g.citers(ws.corpus_refs[i])) {
      const std::int32_t qy = g.year(q);
      if (qy != kUnknownYear && qy < y) dst.push_back(q);
    }
  }

  double sum = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = i + 1; j < r; ++j) {
      const std::size_t n_ij = count_common_sorted(ws.filtered_citers[i], ws.filtered_citers[j]);
      sum += 1.0 / (1.0 + static_cast<double>(n_ij));
    }
  }
  return sum / (static_cast<double>(r) * static_cast<double>(r - 1) / 2.0);
}

PaperMetrics compute_paper_metrics_ws(const CitationGraph& g, PaperIndex focal,
                                      const TimeWindow& w, Workspace& ws) {
  PaperMetrics m;
  m.ref_count = static_cast<std::uint32_t>(g.references(focal).size());

  collect_windowed_citers(g, focal, w, ws.citers);
  m.c_w = static_cast<std::uint32_t>(ws.citers.size());

  const DisruptionCounts counts = disruption_counts_ws(g, focal, w, ws);
  m.d_w = disruption_from_counts(counts, !ws.corpus_refs.empty());

  // ws.corpus_refs still holds the metadata-backed references here.
  const std::int32_t y = g.year(focal);
  if (!ws.corpus_refs.empty()) {
    double age_sum = 0.0, pop_sum = 0.0;
    for (PaperIndex r : ws.corpus_refs) {
      age_sum += static_cast<double>(y - g.year(r));
      pop_sum += static_cast<double>(windowed_citations(g, r, w));
    }
    const double n = static_cast<double>(ws.corpus_refs.size());
    m.ref_age = age_sum / n;
    m.ref_popularity = pop_sum / n;
  }
  m.ref_diversity = reference_diversity_ws(g, focal, ws);
  return m;
}

}  // namespace

std::uint32_t windowed_citations(const CitationGraph& g, PaperIndex focal, const TimeWindow& w) {
  const std::int32_t y = g.year(focal);
  if (y == kUnknownYear) return 0;
  std::uint32_t count = 0;
  for (PaperIndex q : g.citers(focal)) {
    const std::int32_t qy = g.year(q);
    if (qy != kUnknownYear && w.contains(y, qy)) ++count;
  }
  return count;
}

DisruptionCounts disruption_counts(const CitationGraph& g, PaperIndex focal, const TimeWindow& w) {
  Workspace ws;
  return disruption_counts_ws(g, focal, w, ws);
}

std::optional<double> disruption(const CitationGraph& g, PaperIndex focal, const TimeWindow& w) {
  Workspace ws;
  const DisruptionCounts counts = disruption_counts_ws(g, focal, w, ws);
  return disruption_from_counts(counts, !ws.corpus_refs.empty());
}

std::optional<double> reference_age(const CitationGraph& g, PaperIndex focal) {
  const std::int32_t y = g.year(focal);
  double sum = 0.0;
  std::size_t n = 0;
  for (PaperIndex r : g.references(focal)) {
    if (!g.in_corpus(r)) continue;
    sum += static_cast<double>(y - g.year(r));
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> reference_popularity(const CitationGraph& g, PaperIndex focal,
                                           const TimeWindow& w) {
  double sum = 0.0;
  std::size_t n = 0;
  for (PaperIndex r : g.references(focal)) {
    if (!g.in_corpus(r)) continue;
    sum += static_cast<double>(windowed_citations(g, r, w));
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<double> reference_diversity(const CitationGraph& g, PaperIndex focal) {
  Workspace ws;
  g.year(focal);  // bounds check
  return reference_diversity_ws(g, focal, ws);
}

PaperMetrics compute_paper_metrics(const CitationGraph& g, PaperIndex focal, const TimeWindow& w) {
  Workspace ws;
  return compute_paper_metrics_ws(g, focal, w, ws);
}

MetricTable compute_metric_table(const CitationGraph& g, const TimeWindow& w,
                                 const MetricFilters& filters, unsigned threads) {
  if (!w.valid()) throw std::invalid_argument("invalid window: need offset >= 0, length >= 1");

  std::vector<PaperIndex> candidates;
  candidates.reserve(g.corpus_size());
  for (PaperIndex p = 0; p < g.node_count(); ++p) {
    if (!g.in_corpus(p)) continue;
    if (filters.year_range) {
      const std::int32_t y = g.year(p);
      if (y < filters.year_range->first || y > filters.year_range->second) continue;
    }
    if (filters.refs_bin) {
      const std::size_t rc = g.references(p).size();
      if (rc < filters.refs_bin->first || rc > filters.refs_bin->second) continue;
    }
    candidates.push_back(p);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](PaperIndex a, PaperIndex b) { return g.id(a) < g.id(b); });

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, std::max<std::size_t>(candidates.size(), 1));

  std::vector<std::optional<MetricRow>> slots(candidates.size());
  auto worker = [&](std::size_t begin, std::size_t end) {
    Workspace ws;
    for (std::size_t i = begin; i < end; ++i) {
      const PaperIndex p = candidates[i];
      // c_w is cheap; skip the heavy kernels for rows the citation filter
      // would drop anyway.
      if (filters.min_citations > 0 && windowed_citations(g, p, w) < filters.min_citations)
        continue;
      MetricRow row;
      row.id = g.id(p);
      row.year = g.year(p);
      row.metrics = compute_paper_metrics_ws(g, p, w, ws);
      slots[i] = std::move(row);
    }
  };

  if (threads <= 1) {
    worker(0, candidates.size());
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::size_t chunk = (candidates.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = std::min<std::size_t>(t * chunk, candidates.size());
      const std::size_t end = std::min<std::size_t>(begin + chunk, candidates.size());
      pool.emplace_back(worker, begin, end);
    }
    for (auto& th : pool) th.join();
  }

  MetricTable table;
  table.window = w;
  table.filters = filters;
  table.rows.reserve(candidates.size());
  for (auto& slot : slots) {
    if (slot) table.rows.push_back(std::move(*slot));
  }
  return table;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

namespace {

void write_opt(std::ostream& out, const std::optional<double>& v) {
  if (v) out << format_double(*v);
}

}  // namespace

void write_metric_csv(const MetricTable& table, std::ostream& out) {
  out << "id,year,c_w,d_w,ref_count,ref_age,ref_popularity,ref_diversity\n";
  for (const MetricRow& row : table.rows) {
    out << row.id << ',' << row.year << ',' << row.metrics.c_w << ',';
    write_opt(out, row.metrics.d_w);
    out << ',' << row.metrics.ref_count << ',';
    write_opt(out, row.metrics.ref_age);
    out << ',';
    write_opt(out, row.metrics.ref_popularity);
    out << ',';
    write_opt(out, row.metrics.ref_diversity);
    out << '\n';
  }
}

void write_metric_csv(const MetricTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_metric_csv(table, out);
  if (!out) throw IoError("write failure: " + path.string());
}

namespace {

std::optional<double> parse_opt_double(std::string_view field, const std::string& file,
                                       std::size_t lineno) {
  if (field.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(file, lineno, "invalid numeric field '" + std::string(field) + "'");
  }
  return v;
}

template <typename T>
T parse_int_field(std::string_view field, const std::string& file, std::size_t lineno) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(file, lineno, "invalid integer field '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

MetricTable read_metric_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open metrics file: " + path.string());
  const std::string name = path.string();

  std::string line;
  if (!std::getline(in, line)) throw ParseError(name, 1, "empty metrics file");

  MetricTable table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
      std::size_t pos = view.find(',', start);
      if (pos == std::string_view::npos) {
        cols.push_back(view.substr(start));
        break;
      }
      cols.push_back(view.substr(start, pos - start));
      start = pos + 1;
    }
    if (cols.size() != 8) throw ParseError(name, lineno, "expected 8 columns");
    MetricRow row;
    row.id = std::string(cols[0]);
    row.year = parse_int_field<std::int32_t>(cols[1], name, lineno);
    row.metrics.c_w = parse_int_field<std::uint32_t>(cols[2], name, lineno);
    row.metrics.d_w = parse_opt_double(cols[3], name, lineno);
    row.metrics.ref_count = parse_int_field<std::uint32_t>(cols[4], name, lineno);
    row.metrics.ref_age = parse_opt_double(cols[5], name, lineno);
    row.metrics.ref_popularity = parse_opt_double(cols[6], name, lineno);
    row.metrics.ref_diversity = parse_opt_double(cols[7], name, lineno);
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace citemetrics
