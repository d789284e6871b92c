#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "citemetrics/cohort.hpp"
#include "citemetrics/corpus.hpp"
#include "citemetrics/metrics.hpp"
#include "citemetrics/stats.hpp"
#include "citemetrics/synth.hpp"
#include "citemetrics/version.hpp"
#include "manifest.hpp"

namespace fs = std::filesystem;
using namespace citemetrics;

namespace {

std::pair<long long, long long> parse_pair(const std::string& text, char sep,
                                           const std::string& what) {
  const auto pos = text.find(sep);
  if (pos == std::string::npos) {
    throw CLI::ValidationError(what, "expected two values separated by '" + std::string(1, sep) +
                                         "', got '" + text + "'");
  }
  try {
    return {std::stoll(text.substr(0, pos)), std::stoll(text.substr(pos + 1))};
  } catch (const std::exception&) {
    throw CLI::ValidationError(what, "invalid integers in '" + text + "'");
  }
}

TimeWindow parse_window(const std::string& text) {
  auto [offset, length] = parse_pair(text, ',', "--window");
  TimeWindow w{static_cast<int>(offset), static_cast<int>(length)};
  if (!w.valid()) throw CLI::ValidationError("--window", "need offset >= 0 and length >= 1");
  return w;
}

BetaSchedule parse_beta(const std::string& text) {
  BetaSchedule beta;
  if (text.rfind("ramp:", 0) == 0) {
    const std::string rest = text.substr(5);
    const auto pos = rest.find(':');
    if (pos == std::string::npos) {
      throw CLI::ValidationError("--beta", "expected ramp:START:END, got '" + text + "'");
    }
    try {
      beta.start = std::stod(rest.substr(0, pos));
      beta.end = std::stod(rest.substr(pos + 1));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--beta", "invalid ramp values in '" + text + "'");
    }
  } else {
    try {
      beta.start = beta.end = std::stod(text);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--beta", "invalid value '" + text + "'");
    }
  }
  return beta;
}

/// Shared --index / --meta / --edges options plus the index cache contract:
/// with --meta and CITEMETRICS_CACHE_DIR set, the parsed graph is cached as a
/// binary index keyed by the input checksums.
struct GraphInput {
  std::string index_path;
  std::string meta_path;
  std::string edges_path;

  void add_options(CLI::App* cmd, bool required) {
    auto* index = cmd->add_option("--index", index_path, "binary graph index (from `ingest`)");
    auto* meta = cmd->add_option("--meta", meta_path, "corpus metadata file");
    cmd->add_option("--edges", edges_path, "optional edge file (with --meta)")->needs(meta);
    index->excludes(meta);
    if (required) {
      cmd->callback([this, cmd] {
        if (index_path.empty() && meta_path.empty()) {
          throw CLI::RequiredError(cmd->get_name() + ": one of --index or --meta");
        }
      });
    }
  }

  bool given() const { return !index_path.empty() || !meta_path.empty(); }

  std::string content_hash() const {
    if (!index_path.empty()) return cli::sha256_file(index_path);
    std::string h = cli::sha256_file(meta_path);
    if (!edges_path.empty()) h += "-" + cli::sha256_file(edges_path);
    return h;
  }

  CitationGraph load(std::string* hash_out = nullptr) const {
    const std::string hash = content_hash();
    if (hash_out) *hash_out = hash;
    if (!index_path.empty()) return load_graph_index(index_path);

    std::optional<fs::path> cache;
    if (const char* dir = std::getenv("CITEMETRICS_CACHE_DIR"); dir && *dir) {
      fs::create_directories(dir);
      cache = fs::path(dir) / (hash.substr(0, 32) + ".idx");
      if (fs::exists(*cache)) return load_graph_index(*cache);
    }
    std::optional<fs::path> edges;
    if (!edges_path.empty()) edges = edges_path;
    auto result = load_corpus(meta_path, edges);
    if (cache) save_graph_index(result.graph, *cache);
    return std::move(result.graph);
  }
};

void warn_if_all_undefined(const YearSeries& series, const std::string& name) {
  for (const auto& p : series) {
    if (p.value) return;
  }
  std::cerr << "warning: series '" << name << "' has no defined values\n";
}

fs::path write_series(const YearSeries& series, const fs::path& out_dir, const std::string& name,
                      cli::RunManifest& manifest) {
  const fs::path path = out_dir / name;
  write_year_series_csv(series, path);
  manifest.add_output(path);
  warn_if_all_undefined(series, name);
  return path;
}

MetricTable load_table(const std::string& path) {
  MetricTable table = read_metric_csv(path);
  std::sort(table.rows.begin(), table.rows.end(),
            [](const MetricRow& a, const MetricRow& b) { return a.id < b.id; });
  return table;
}

std::vector<double> read_csv_column(const fs::path& path, const std::string& column) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path.string(), 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::vector<std::string> header;
  {
    std::size_t start = 0;
    while (true) {
      const auto pos = line.find(',', start);
      if (pos == std::string::npos) {
        header.push_back(line.substr(start));
        break;
      }
      header.push_back(line.substr(start, pos - start));
      start = pos + 1;
    }
  }
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) {
    throw ParseError(path.string(), 1, "no column named '" + column + "'");
  }
  const std::size_t target = static_cast<std::size_t>(it - header.begin());

  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = 0, col = 0;
    std::string field;
    bool found = false;
    while (true) {
      const auto pos = line.find(',', start);
      const std::string cell =
          pos == std::string::npos ? line.substr(start) : line.substr(start, pos - start);
      if (col == target) {
        field = cell;
        found = true;
        break;
      }
      if (pos == std::string::npos) break;
      start = pos + 1;
      ++col;
    }
    if (!found || field.empty()) continue;
    try {
      values.push_back(std::stod(field));
    } catch (const std::exception&) {
      throw ParseError(path.string(), lineno, "invalid numeric cell '" + field + "'");
    }
  }
  return values;
}

nlohmann::json window_json(const TimeWindow& w) {
  return {{"offset", w.offset}, {"length", w.length}};
}

void apply_year_filter(MetricTable& table, const std::optional<std::pair<int, int>>& years) {
  if (!years) return;
  std::erase_if(table.rows, [&](const MetricRow& row) {
    return row.year < years->first || row.year > years->second;
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"citemetrics: batch citation-network analytics"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  try {
    // ---- ingest ----------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "parse a corpus and cache its binary index");
    std::string ingest_meta, ingest_edges, ingest_out;
    ingest->add_option("--meta", ingest_meta, "metadata file")->required();
    ingest->add_option("--edges", ingest_edges, "edge file");
    ingest->add_option("--out", ingest_out, "output index path")->required();
    ingest->callback([&] {
      std::optional<fs::path> edges;
      if (!ingest_edges.empty()) edges = ingest_edges;
      auto result = load_corpus(ingest_meta, edges);
      save_graph_index(result.graph, ingest_out);
      std::cout << result.report.to_json() << '\n';
    });

    // ---- validate --------------------------------------------------------
    auto* validate = app.add_subcommand("validate", "report corpus anomalies");
    auto validate_input = std::make_shared<GraphInput>();
    validate_input->add_options(validate, true);
    validate->callback([validate_input] {
      const CitationGraph graph = validate_input->load();
      const auto warnings = validate_corpus(graph);
      for (const auto& w : warnings) std::cout << w.message << '\n';
      std::cerr << warnings.size() << " warning(s)\n";
    });

    // ---- metrics ---------------------------------------------------------
    auto* metrics_cmd = app.add_subcommand("metrics", "compute the per-paper metric table");
    auto metrics_input = std::make_shared<GraphInput>();
    metrics_input->add_options(metrics_cmd, true);
    std::string metrics_out = "metrics.csv";
    std::string window_text = "1,5";
    unsigned min_citations = 0;
    std::string refs_bin_text, years_text;
    unsigned threads = 0;
    metrics_cmd->add_option("--out", metrics_out, "output CSV path");
    metrics_cmd->add_option("--window", window_text, "window as OFFSET,LENGTH")
        ->capture_default_str();
    metrics_cmd->add_option("--min-citations", min_citations, "drop rows with c_w below N");
    metrics_cmd->add_option("--refs-bin", refs_bin_text, "keep rows with ref_count in LO,HI");
    metrics_cmd->add_option("--years", years_text, "keep rows with year in A,B");
    metrics_cmd->add_option("--threads", threads, "worker threads (0 = hardware)");
    metrics_cmd->callback([&, metrics_input] {
      const TimeWindow w = parse_window(window_text);
      MetricFilters filters;
      filters.min_citations = min_citations;
      if (!refs_bin_text.empty()) {
        auto [lo, hi] = parse_pair(refs_bin_text, ',', "--refs-bin");
        filters.refs_bin = {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(hi)};
      }
      if (!years_text.empty()) {
        auto [a, b] = parse_pair(years_text, ',', "--years");
        filters.year_range = {static_cast<std::int32_t>(a), static_cast<std::int32_t>(b)};
      }
      std::string hash;
      const CitationGraph graph = metrics_input->load(&hash);
      const MetricTable table = compute_metric_table(graph, w, filters, threads);
      const fs::path out_path = metrics_out;
      write_metric_csv(table, out_path);

      cli::RunManifest manifest("metrics", out_path.parent_path());
      manifest.set_corpus_hash(hash);
      manifest.params()["window"] = window_json(w);
      manifest.params()["filters"] = {
          {"min_citations", filters.min_citations},
          {"refs_bin", filters.refs_bin
                           ? nlohmann::json({filters.refs_bin->first, filters.refs_bin->second})
                           : nlohmann::json(nullptr)},
          {"years", filters.year_range
                        ? nlohmann::json({filters.year_range->first, filters.year_range->second})
                        : nlohmann::json(nullptr)}};
      manifest.params()["threads"] = threads;
      manifest.params()["rows"] = table.rows.size();
      manifest.add_output(out_path);
      manifest.write(out_path.filename().string() + ".manifest.json");
    });

    // ---- analyze ---------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "cohort analyses over a metric table");
    analyze->require_subcommand(1);
    std::string metrics_path;
    std::string out_dir = ".";
    analyze->add_option("--metrics", metrics_path, "metric table CSV (from `metrics`)");
    analyze->add_option("--out-dir", out_dir, "output directory")->capture_default_str();
    auto analyze_input = std::make_shared<GraphInput>();

    auto out_dir_path = [&]() {
      fs::path dir = out_dir;
      fs::create_directories(dir);
      return dir;
    };
    auto require_metrics = [&]() -> MetricTable {
      if (metrics_path.empty()) {
        throw CLI::RequiredError("analyze: --metrics");
      }
      return load_table(metrics_path);
    };

    // correlations
    auto* corr = analyze->add_subcommand("correlations", "yearly correlation of c_w vs a metric");
    std::string methods_text = "pearson,spearman,kendall";
    std::string corr_metric = "d_w";
    std::size_t min_cohort = kDefaultMinCohort;
    bool log1p_cw = false;
    corr->add_option("--methods", methods_text, "comma-separated methods")->capture_default_str();
    corr->add_option("--metric", corr_metric, "d_w | ref_age | ref_popularity | ref_diversity")
        ->capture_default_str();
    corr->add_option("--min-cohort", min_cohort, "minimum defined pairs per year")
        ->capture_default_str();
    corr->add_flag("--log1p", log1p_cw, "apply log1p to c_w before correlating (sensitivity)");
    corr->callback([&] {
      const MetricTable table = require_metrics();
      const auto column = parse_column(corr_metric);
      if (!column) throw CLI::ValidationError("--metric", "unknown column " + corr_metric);
      cli::RunManifest manifest("analyze correlations", out_dir_path());
      manifest.params()["metric"] = corr_metric;
      manifest.params()["min_cohort"] = min_cohort;
      manifest.params()["log1p"] = log1p_cw;
      std::stringstream methods(methods_text);
      std::string method_text;
      while (std::getline(methods, method_text, ',')) {
        const auto method = parse_method(method_text);
        if (!method) throw CLI::ValidationError("--methods", "unknown method " + method_text);
        const YearSeries series =
            metric_correlation_series(table, *column, *method, min_cohort, log1p_cw);
        write_series(series, out_dir_path(),
                     "correlations_" + corr_metric + "_" + method_text + ".csv", manifest);
      }
      manifest.write();
    });

    // relative-citations
    auto* relcit = analyze->add_subcommand("relative-citations",
                                           "branch mean c_w over yearly mean c_w");
    std::string split_by = "d_w";
    std::string split_mode = "sign";
    double split_threshold = 0.0;
    relcit->add_option("--by", split_by, "metric column")->capture_default_str();
    relcit->add_option("--mode", split_mode, "sign | median")->capture_default_str();
    relcit->add_option("--threshold", split_threshold, "sign-split threshold")
        ->capture_default_str();
    relcit->callback([&] {
      const MetricTable table = require_metrics();
      const auto column = parse_column(split_by);
      if (!column) throw CLI::ValidationError("--by", "unknown column " + split_by);
      SplitSpec split;
      if (split_mode == "sign") {
        split = SignSplit{*column, split_threshold};
      } else if (split_mode == "median") {
        split = MedianSplit{*column};
      } else {
        throw CLI::ValidationError("--mode", "expected sign or median");
      }
      const auto result = relative_citation_series(table, split);
      cli::RunManifest manifest("analyze relative-citations", out_dir_path());
      manifest.params()["by"] = split_by;
      manifest.params()["mode"] = split_mode;
      manifest.params()["threshold"] = split_threshold;
      manifest.params()["high_label"] = result.high_label;
      manifest.params()["low_label"] = result.low_label;
      write_series(result.high, out_dir_path(), "relcit_high.csv", manifest);
      write_series(result.low, out_dir_path(), "relcit_low.csv", manifest);
      manifest.write();
    });

    // strata
    auto* strata = analyze->add_subcommand("strata", "disruption by impact strata");
    double strata_top = 10.0, strata_bottom = 10.0;
    strata->add_option("--top", strata_top, "top percentile width")->capture_default_str();
    strata->add_option("--bottom", strata_bottom, "bottom percentile width")
        ->capture_default_str();
    strata->callback([&] {
      const MetricTable table = require_metrics();
      std::vector<PercentileBand> bands = {
          {100.0 - strata_top, 100.0, "top"},
          {0.0, strata_bottom, "bottom"},
          {0.0, 100.0, "all"},
      };
      const auto result = disruption_by_impact_strata(table, bands);
      cli::RunManifest manifest("analyze strata", out_dir_path());
      manifest.params()["top"] = strata_top;
      manifest.params()["bottom"] = strata_bottom;
      for (const auto& stratum : result) {
        write_series(stratum.mean_d, out_dir_path(), "strata_" + stratum.band.label + "_mean_d.csv",
                     manifest);
        write_series(stratum.frac_pos, out_dir_path(),
                     "strata_" + stratum.band.label + "_frac_pos.csv", manifest);
      }
      manifest.write();
    });

    // era-deltas
    auto* eras = analyze->add_subcommand("era-deltas", "late-era minus early-era statistics");
    int early_cut = 1960, late_cut = 2000;
    std::size_t era_bins = 10;
    std::string era_stat = "mean";
    eras->add_option("--early", early_cut, "early era: year <= this cut")->capture_default_str();
    eras->add_option("--late", late_cut, "late era: year >= this cut")->capture_default_str();
    eras->add_option("--bins", era_bins, "number of equal percentile bins")->capture_default_str();
    eras->add_option("--stat", era_stat, "mean | fpos")->capture_default_str();
    eras->callback([&] {
      const MetricTable table = require_metrics();
      const EraStatistic stat = [&] {
        if (era_stat == "mean") return EraStatistic::mean_d;
        if (era_stat == "fpos") return EraStatistic::frac_positive;
        throw CLI::ValidationError("--stat", "expected mean or fpos");
      }();
      const auto bands = equal_percentile_bands(era_bins);
      const auto deltas = era_deltas(table, early_cut, late_cut, bands, stat);
      const fs::path path = out_dir_path() / "era_deltas.csv";
      std::ofstream out(path);
      out << "bin_lo,bin_hi,delta,n_early,n_late\n";
      for (const auto& d : deltas) {
        out << format_double(d.band.lo) << ',' << format_double(d.band.hi) << ',';
        if (d.delta) out << format_double(*d.delta);
        out << ',' << d.n_early << ',' << d.n_late << '\n';
      }
      out.close();
      cli::RunManifest manifest("analyze era-deltas", out_dir_path());
      manifest.params()["early"] = early_cut;
      manifest.params()["late"] = late_cut;
      manifest.params()["bins"] = era_bins;
      manifest.params()["stat"] = era_stat;
      manifest.add_output(path);
      manifest.write();
    });

    // pref-attach
    auto* pref = analyze->add_subcommand("pref-attach",
                                         "first-window vs second-window citation correlation");
    analyze_input->add_options(pref, true);
    std::string first_text = "1,5", second_text = "6,5";
    int scatter_year = -1;
    pref->add_option("--first", first_text, "first window OFFSET,LENGTH")->capture_default_str();
    pref->add_option("--second", second_text, "second window OFFSET,LENGTH")
        ->capture_default_str();
    pref->add_option("--scatter-year", scatter_year, "restrict scatter export to one year");
    pref->callback([&] {
      std::string hash;
      const CitationGraph graph = analyze_input->load(&hash);
      const auto result = preferential_attachment_series(graph, parse_window(first_text),
                                                         parse_window(second_text));
      cli::RunManifest manifest("analyze pref-attach", out_dir_path());
      manifest.set_corpus_hash(hash);
      manifest.params()["first"] = window_json(parse_window(first_text));
      manifest.params()["second"] = window_json(parse_window(second_text));
      write_series(result.correlation, out_dir_path(), "prefattach_corr.csv", manifest);
      const fs::path scatter_path = out_dir_path() / "prefattach_scatter.csv";
      std::ofstream out(scatter_path);
      out << "id,dk_first,dk_second\n";
      for (const auto& p : result.scatter) {
        if (scatter_year >= 0 && p.year != scatter_year) continue;
        out << p.id << ',' << p.dk_first << ',' << p.dk_second << '\n';
      }
      out.close();
      manifest.add_output(scatter_path);
      manifest.write();
    });

    // share
    auto* share = analyze->add_subcommand("share", "citation share of top-ranked papers");
    double top_fraction = 0.01;
    std::string share_by = "c_w";
    share->add_option("--top-fraction", top_fraction, "fraction in (0,1)")->capture_default_str();
    share->add_option("--by", share_by, "ranking column: c_w | d_w")->capture_default_str();
    share->callback([&] {
      const MetricTable table = require_metrics();
      const auto column = parse_column(share_by);
      if (!column) throw CLI::ValidationError("--by", "unknown column " + share_by);
      const auto series = citation_share(table, top_fraction, *column);
      cli::RunManifest manifest("analyze share", out_dir_path());
      manifest.params()["top_fraction"] = top_fraction;
      manifest.params()["by"] = share_by;
      write_series(series, out_dir_path(), "share.csv", manifest);
      manifest.write();
    });

    // fields
    auto* fields = analyze->add_subcommand("fields", "statistics by field-size bin");
    auto fields_input = std::make_shared<GraphInput>();
    fields_input->add_options(fields, true);
    std::string bins_text;
    double fields_top_fraction = 0.01;
    fields->add_option("--bins", bins_text, "comma-separated ascending size-bin edges");
    fields->add_option("--top-fraction", fields_top_fraction, "share fraction")
        ->capture_default_str();
    fields->callback([&, fields_input] {
      const MetricTable table = require_metrics();
      std::string hash;
      const CitationGraph graph = fields_input->load(&hash);
      std::vector<double> edges;
      if (!bins_text.empty()) {
        std::stringstream ss(bins_text);
        std::string item;
        while (std::getline(ss, item, ',')) edges.push_back(std::stod(item));
      }
      const auto result = field_stratification(graph, table, edges, fields_top_fraction);
      cli::RunManifest manifest("analyze fields", out_dir_path());
      manifest.set_corpus_hash(hash);
      manifest.params()["top_fraction"] = fields_top_fraction;

      const fs::path sizes_path = out_dir_path() / "field_sizes.csv";
      {
        std::ofstream out(sizes_path);
        out << "code,size\n";
        for (const auto& [code, size] : result.field_sizes) out << code << ',' << size << '\n';
      }
      manifest.add_output(sizes_path);

      const fs::path bins_path = out_dir_path() / "field_bins.csv";
      {
        std::ofstream out(bins_path);
        out << "bin_lo,bin_hi,n_fields,n_rows,correlation,rel_cit_high_dw,rel_cit_low_dw,"
               "citation_share\n";
        for (const auto& bin : result.bins) {
          out << format_double(bin.size_lo) << ',' << format_double(bin.size_hi) << ','
              << bin.n_fields << ',' << bin.n_rows << ',';
          if (bin.correlation.value) out << format_double(*bin.correlation.value);
          out << ',';
          if (bin.rel_cit_high_d) out << format_double(*bin.rel_cit_high_d);
          out << ',';
          if (bin.rel_cit_low_d) out << format_double(*bin.rel_cit_low_d);
          out << ',';
          if (bin.share) out << format_double(*bin.share);
          out << '\n';
        }
      }
      manifest.add_output(bins_path);
      manifest.write();
    });

    // growth
    auto* growth = analyze->add_subcommand("growth", "papers per publication year");
    auto growth_input = std::make_shared<GraphInput>();
    growth_input->add_options(growth, true);
    growth->callback([&, growth_input] {
      std::string hash;
      const CitationGraph graph = growth_input->load(&hash);
      cli::RunManifest manifest("analyze growth", out_dir_path());
      manifest.set_corpus_hash(hash);
      write_series(papers_per_year(graph), out_dir_path(), "growth.csv", manifest);
      manifest.write();
    });

    // surrogate
    auto* surrogate = analyze->add_subcommand("surrogate",
                                              "year-reshuffled yearly correlations");
    std::size_t trials = 100;
    std::uint64_t surrogate_seed = 0;
    std::string surrogate_method = "pearson";
    std::size_t surrogate_min_cohort = kDefaultMinCohort;
    unsigned surrogate_threads = 1;
    surrogate->add_option("--trials", trials)->capture_default_str();
    surrogate->add_option("--seed", surrogate_seed)->capture_default_str();
    surrogate->add_option("--method", surrogate_method)->capture_default_str();
    surrogate->add_option("--min-cohort", surrogate_min_cohort)->capture_default_str();
    surrogate->add_option("--threads", surrogate_threads)->capture_default_str();
    surrogate->callback([&] {
      const MetricTable table = require_metrics();
      const auto method = parse_method(surrogate_method);
      if (!method) throw CLI::ValidationError("--method", "unknown method " + surrogate_method);
      const auto result = reshuffle_years_surrogate(table, *method, surrogate_min_cohort,
                                                    surrogate_seed, trials, surrogate_threads);
      const fs::path path = out_dir_path() / "surrogate_yearly.csv";
      {
        std::ofstream out(path);
        out << "trial,year,value,n\n";
        for (std::size_t t = 0; t < result.size(); ++t) {
          for (const auto& point : result[t]) {
            out << t << ',' << point.year << ',';
            if (point.corr.value) out << format_double(*point.corr.value);
            out << ',' << point.corr.n << '\n';
          }
        }
      }
      cli::RunManifest manifest("analyze surrogate", out_dir_path());
      manifest.params()["trials"] = trials;
      manifest.params()["seed"] = surrogate_seed;
      manifest.params()["method"] = surrogate_method;
      manifest.params()["min_cohort"] = surrogate_min_cohort;
      manifest.add_output(path);
      manifest.write();
    });

    // shift-test
    auto* shift = analyze->add_subcommand("shift-test", "Pearson under circular shifts");
    std::string shift_metric = "d_w";
    int max_shift = 20;
    std::string shift_years;
    shift->add_option("--metric", shift_metric, "column correlated against c_w")
        ->capture_default_str();
    shift->add_option("--max-shift", max_shift)->capture_default_str();
    shift->add_option("--years", shift_years, "restrict to years A,B");
    shift->callback([&] {
      MetricTable table = require_metrics();
      if (!shift_years.empty()) {
        auto [a, b] = parse_pair(shift_years, ',', "--years");
        apply_year_filter(table, std::pair{static_cast<int>(a), static_cast<int>(b)});
      }
      const auto column = parse_column(shift_metric);
      if (!column) throw CLI::ValidationError("--metric", "unknown column " + shift_metric);
      std::vector<double> xs, ys;
      for (const auto& row : table.rows) {  // rows already ordered by id
        const auto y = column_value(row, *column);
        if (!y) continue;
        xs.push_back(static_cast<double>(row.metrics.c_w));
        ys.push_back(*y);
      }
      const auto result = pearson_shift_test(xs, ys, max_shift);
      const fs::path path = out_dir_path() / "shift_test.csv";
      {
        std::ofstream out(path);
        out << "shift,value\n";
        for (const auto& [s, value] : result) {
          out << s << ',';
          if (value) out << format_double(*value);
          out << '\n';
        }
      }
      cli::RunManifest manifest("analyze shift-test", out_dir_path());
      manifest.params()["metric"] = shift_metric;
      manifest.params()["max_shift"] = max_shift;
      if (!shift_years.empty()) manifest.params()["years"] = shift_years;
      manifest.params()["n"] = xs.size();
      manifest.add_output(path);
      manifest.write();
    });

    // bootstrap
    auto* boot = analyze->add_subcommand("bootstrap", "bootstrap distribution of mean c_w");
    std::size_t realizations = 10000;
    std::uint64_t boot_seed = 0;
    std::string boot_years, boot_subset = "all";
    boot->add_option("--realizations", realizations)->capture_default_str();
    boot->add_option("--seed", boot_seed)->capture_default_str();
    boot->add_option("--years", boot_years, "restrict to years A,B");
    boot->add_option("--subset", boot_subset,
                     "all | d-pos | d-neg | upper:<column> | lower:<column>")
        ->capture_default_str();
    boot->callback([&] {
      MetricTable table = require_metrics();
      if (!boot_years.empty()) {
        auto [a, b] = parse_pair(boot_years, ',', "--years");
        apply_year_filter(table, std::pair{static_cast<int>(a), static_cast<int>(b)});
      }
      std::vector<std::size_t> rows;
      if (boot_subset == "all") {
        for (std::size_t i = 0; i < table.rows.size(); ++i) rows.push_back(i);
      } else if (boot_subset == "d-pos" || boot_subset == "d-neg") {
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
          const auto& d = table.rows[i].metrics.d_w;
          if (!d) continue;
          if (boot_subset == "d-pos" ? *d > 0.0 : *d < 0.0) rows.push_back(i);
        }
      } else if (boot_subset.rfind("upper:", 0) == 0 || boot_subset.rfind("lower:", 0) == 0) {
        const bool upper = boot_subset[0] == 'u';
        const auto column = parse_column(boot_subset.substr(6));
        if (!column) {
          throw CLI::ValidationError("--subset", "unknown column in '" + boot_subset + "'");
        }
        std::vector<std::size_t> defined;
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
          if (column_value(table.rows[i], *column)) defined.push_back(i);
        }
        std::sort(defined.begin(), defined.end(), [&](std::size_t a, std::size_t b) {
          const double va = *column_value(table.rows[a], *column);
          const double vb = *column_value(table.rows[b], *column);
          if (va != vb) return va < vb;
          return table.rows[a].id < table.rows[b].id;
        });
        const std::size_t half = defined.size() / 2;
        if (upper) {
          rows.assign(defined.begin() + static_cast<std::ptrdiff_t>(half), defined.end());
        } else {
          rows.assign(defined.begin(), defined.begin() + static_cast<std::ptrdiff_t>(half));
        }
      } else {
        throw CLI::ValidationError("--subset", "unknown subset '" + boot_subset + "'");
      }
      std::vector<double> sample;
      sample.reserve(rows.size());
      for (std::size_t i : rows) sample.push_back(static_cast<double>(table.rows[i].metrics.c_w));
      const auto dist = bootstrap_means(sample, realizations, boot_seed);
      const fs::path path = out_dir_path() / "bootstrap.csv";
      {
        std::ofstream out(path);
        out << "mean\n";
        for (double m : dist.means) out << format_double(m) << '\n';
      }
      cli::RunManifest manifest("analyze bootstrap", out_dir_path());
      manifest.params()["realizations"] = realizations;
      manifest.params()["seed"] = boot_seed;
      manifest.params()["subset"] = boot_subset;
      if (!boot_years.empty()) manifest.params()["years"] = boot_years;
      manifest.params()["sample_size"] = sample.size();
      manifest.params()["quantiles"] = {{"q025", dist.q025}, {"median", dist.median},
                                        {"q975", dist.q975}};
      manifest.add_output(path);
      manifest.write();
    });

    // ks
    auto* ks = analyze->add_subcommand("ks", "two-sample Kolmogorov-Smirnov test");
    std::string ks_a, ks_b, ks_column = "mean";
    ks->add_option("--a", ks_a, "first CSV file")->required();
    ks->add_option("--b", ks_b, "second CSV file")->required();
    ks->add_option("--column", ks_column)->capture_default_str();
    ks->callback([&] {
      const auto a = read_csv_column(ks_a, ks_column);
      const auto b = read_csv_column(ks_b, ks_column);
      const auto result = ks_two_sample(a, b);
      const fs::path path = out_dir_path() / "ks.csv";
      {
        std::ofstream out(path);
        out << "statistic,p_value,n_a,n_b\n";
        out << format_double(result.statistic) << ',' << format_double(result.p_value) << ','
            << a.size() << ',' << b.size() << '\n';
      }
      std::cout << "{\"statistic\":" << format_double(result.statistic)
                << ",\"p_value\":" << format_double(result.p_value) << ",\"n_a\":" << a.size()
                << ",\"n_b\":" << b.size() << "}\n";
      cli::RunManifest manifest("analyze ks", out_dir_path());
      manifest.params()["a"] = ks_a;
      manifest.params()["b"] = ks_b;
      manifest.params()["column"] = ks_column;
      manifest.add_output(path);
      manifest.write();
    });

    // ---- synth -----------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
    GenConfig config;
    std::string years_span = "1950:2009";
    std::string beta_text = "0";
    std::string synth_out = "corpus.tsv";
    std::string truth_out;
    synth->add_option("--years", years_span, "simulated span BEGIN:END")->capture_default_str();
    synth->add_option("--c0", config.initial_per_year, "papers in the first year")
        ->capture_default_str();
    synth->add_option("--growth", config.growth, "exponential growth rate")
        ->capture_default_str();
    synth->add_option("--refs-mean", config.refs_mean)->capture_default_str();
    synth->add_option("--refs-spread", config.refs_spread)->capture_default_str();
    synth->add_option("--ref-recency", config.ref_recency_years,
                      "limit reference targets to the last N years (0 = unlimited)")
        ->capture_default_str();
    synth->add_option("--initial-stock", config.initial_stock,
                      "extra pre-wired papers in the first year")
        ->capture_default_str();
    synth->add_option("--alpha", config.attachment_mix, "preferential-attachment mix in [0,1]")
        ->capture_default_str();
    synth->add_option("--copy-prob", config.copy_prob,
                      "probability of also citing a reference of a chosen reference")
        ->capture_default_str();
    synth->add_option("--beta", beta_text, "coupling: CONST or ramp:START:END")
        ->capture_default_str();
    synth->add_option("--fields", config.field_count)->capture_default_str();
    synth->add_option("--field-skew", config.field_skew)->capture_default_str();
    synth->add_option("--seed", config.seed)->capture_default_str();
    synth->add_option("--out", synth_out, "corpus metadata output")->capture_default_str();
    synth->add_option("--truth", truth_out, "planted-truth JSON (default <out>.truth.json)");
    synth->callback([&] {
      const auto pos = years_span.find(':');
      if (pos == std::string::npos) {
        throw CLI::ValidationError("--years", "expected BEGIN:END, got '" + years_span + "'");
      }
      config.year_begin = static_cast<std::int32_t>(std::stol(years_span.substr(0, pos)));
      config.year_end = static_cast<std::int32_t>(std::stol(years_span.substr(pos + 1)));
      config.coupling = parse_beta(beta_text);
      config.validate();

      const auto records = generate_records(config);
      write_records(records, fs::path(synth_out));
      const fs::path truth_path = truth_out.empty() ? fs::path(synth_out + ".truth.json")
                                                    : fs::path(truth_out);
      {
        std::ofstream out(truth_path);
        if (!out) throw IoError("cannot open for writing: " + truth_path.string());
        out << planted_truth(config).to_json() << '\n';
      }
      std::cerr << "wrote " << records.size() << " papers to " << synth_out << '\n';
    });

    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
