// Acceptance suite: one line per criterion, [PASS]/[FAIL]/[SKIP], exit code
// equals the number of failures. Thresholds are fixed here, not configurable.

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "citemetrics/cohort.hpp"
#include "citemetrics/corpus.hpp"
#include "citemetrics/metrics.hpp"
#include "citemetrics/random.hpp"
#include "citemetrics/stats.hpp"
#include "citemetrics/synth.hpp"
#include "oracles.hpp"
#include "random_corpus.hpp"
#include "toy_corpus.hpp"

using namespace citemetrics;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string detail;

  static Outcome pass(std::string detail = "") { return {Status::pass, std::move(detail)}; }
  static Outcome fail(std::string detail) { return {Status::fail, std::move(detail)}; }
  static Outcome skip(std::string detail) { return {Status::skip, std::move(detail)}; }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// planted corpus shared by the recovery, surrogate and shift criteria
// ---------------------------------------------------------------------------

GenConfig planted_config(std::uint64_t seed) {
  GenConfig cfg;
  cfg.year_begin = 1950;
  cfg.year_end = 2009;  // 60 simulated years
  cfg.initial_per_year = 120;
  cfg.growth = 0.05;  // ~45k papers
  cfg.refs_mean = 7;
  cfg.refs_spread = 2;
  cfg.ref_recency_years = 8;
  cfg.attachment_mix = 0.7;
  cfg.copy_prob = 0.25;
  cfg.coupling = {0.8, -0.8};
  cfg.field_count = 12;
  cfg.field_skew = 1.0;
  cfg.seed = seed;
  return cfg;
}

struct EraYears {
  std::vector<std::int32_t> first;  // beta >= +0.5
  std::vector<std::int32_t> last;   // beta <= -0.5
};

EraYears planted_eras(const GenConfig& cfg) {
  EraYears eras;
  for (const auto& y : planted_truth(cfg).years) {
    if (y.beta >= 0.5) eras.first.push_back(y.year);
    if (y.beta <= -0.5) eras.last.push_back(y.year);
  }
  return eras;
}

MetricTable planted_table(std::uint64_t seed) {
  const auto cfg = planted_config(seed);
  const auto graph = generate(cfg).graph;
  return compute_metric_table(graph, {1, 5});
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

Outcome disruption_oracle_equivalence() {
  const auto start = Clock::now();
  const std::vector<TimeWindow> windows = {{1, 5}, {1, 10}, {0, 5}};
  std::size_t papers_checked = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto records = testsupport::random_records(seed);
    const testsupport::RecordCorpus corpus(records);
    const auto graph = build_corpus(records).graph;
    for (const auto& w : windows) {
      for (std::size_t i = 0; i < records.size(); ++i) {
        const auto p = graph.find(records[i].id);
        const auto expected = testsupport::disruption_oracle(corpus, i, w);
        const auto actual = disruption(graph, *p, w);
        if (expected.has_value() != actual.has_value() ||
            (expected && *expected != *actual)) {
          return Outcome::fail("mismatch at seed " + std::to_string(seed) + " paper " +
                               records[i].id + " window (" + std::to_string(w.offset) + "," +
                               std::to_string(w.length) + ")");
        }
        ++papers_checked;
      }
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) return Outcome::fail("runtime " + fmt(elapsed) + " s >= 60 s");
  return Outcome::pass(std::to_string(papers_checked) + " paper-window checks, " + fmt(elapsed) +
                       " s");
}

Outcome toy_ground_truth() {
  const auto graph = build_corpus(testsupport::toy_records()).graph;
  const TimeWindow w{1, 5};
  const auto f = *graph.find("F");
  const auto g = *graph.find("G");

  const auto d = disruption(graph, f, w);
  if (!d || *d != 0.25) return Outcome::fail("D(F) != 0.25");
  if (windowed_citations(graph, f, w) != 3) return Outcome::fail("C5(F) != 3");
  const auto ra = reference_age(graph, f);
  if (!ra || *ra != 5.0) return Outcome::fail("ra(F) != 5.0");
  const auto rd = reference_diversity(graph, g);
  const double expected_rd = (0.5 + 1.0 + 0.25) / 3.0;  // 7/12 as the same fold
  if (!rd || *rd != expected_rd) return Outcome::fail("rd(G) != 7/12");
  return Outcome::pass("D=0.25 C5=3 ra=5 rd=7/12");
}

Outcome metric_ranges() {
  const auto start = Clock::now();
  GenConfig cfg;
  cfg.year_begin = 1950;
  cfg.year_end = 2009;
  cfg.initial_per_year = 272;  // ~1e5 papers over 60 years at growth 0.05
  cfg.growth = 0.05;
  cfg.refs_mean = 8;
  cfg.refs_spread = 3;
  cfg.attachment_mix = 0.6;
  cfg.copy_prob = 0.2;
  cfg.coupling = {0.4, 0.4};
  cfg.seed = 2024;
  const auto graph = generate(cfg).graph;
  if (graph.corpus_size() < 100000) {
    return Outcome::fail("generated only " + std::to_string(graph.corpus_size()) + " papers");
  }
  const auto table = compute_metric_table(graph, {1, 5});
  std::size_t defined_d = 0, defined_rd = 0;
  for (const auto& row : table.rows) {
    if (row.metrics.d_w) {
      ++defined_d;
      if (*row.metrics.d_w < -1.0 || *row.metrics.d_w > 1.0) {
        return Outcome::fail("d_w out of range for " + row.id);
      }
    }
    if (row.metrics.ref_diversity) {
      ++defined_rd;
      if (*row.metrics.ref_diversity <= 0.0 || *row.metrics.ref_diversity > 1.0) {
        return Outcome::fail("rd out of range for " + row.id);
      }
    }
  }

  // boundary values on constructed extremal corpora
  {
    const auto g1 = build_corpus(std::vector<PaperRecord>{
        {"r", 1995, {}, {}},
        {"F", 2000, {"r"}, {}},
        {"c", 2001, {"F"}, {}},
    }).graph;
    if (*disruption(g1, *g1.find("F"), {1, 5}) != 1.0) return Outcome::fail("D=+1 toy failed");
    const auto g2 = build_corpus(std::vector<PaperRecord>{
        {"r", 1995, {}, {}},
        {"F", 2000, {"r"}, {}},
        {"c", 2001, {"F", "r"}, {}},
    }).graph;
    if (*disruption(g2, *g2.find("F"), {1, 5}) != -1.0) return Outcome::fail("D=-1 toy failed");
    const auto g3 = build_corpus(std::vector<PaperRecord>{
        {"a", 1990, {}, {}},
        {"b", 1991, {}, {}},
        {"F", 2000, {"a", "b"}, {}},
    }).graph;
    if (*reference_diversity(g3, *g3.find("F")) != 1.0) return Outcome::fail("rd=1 toy failed");
  }

  const double elapsed = seconds_since(start);
  if (elapsed >= 120.0) return Outcome::fail("runtime " + fmt(elapsed) + " s >= 120 s");
  return Outcome::pass(std::to_string(table.rows.size()) + " rows, " +
                       std::to_string(defined_d) + " defined d_w, " +
                       std::to_string(defined_rd) + " defined rd, " + fmt(elapsed) + " s");
}

Outcome correlation_oracle() {
  std::mt19937_64 rng(derive_seed(424242, "acceptance-corr"));
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 499);
    const bool ties = trial % 2 == 0;
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = ties ? static_cast<double>(uniform_index(rng, 6)) : uniform_unit(rng) * 200 - 100;
      y[i] = ties ? static_cast<double>(uniform_index(rng, 4)) : uniform_unit(rng) * 200 - 100;
    }
    struct Pair {
      CorrelationMethod method;
      std::optional<double> expected;
    };
    const std::vector<Pair> oracle = {
        {CorrelationMethod::pearson, testsupport::pearson_oracle(x, y)},
        {CorrelationMethod::spearman, testsupport::spearman_oracle(x, y)},
        {CorrelationMethod::kendall, testsupport::kendall_oracle(x, y)},
    };
    for (const auto& [method, expected] : oracle) {
      const auto actual = correlation(x, y, method).value;
      if (expected.has_value() != actual.has_value()) {
        return Outcome::fail("definedness mismatch, trial " + std::to_string(trial));
      }
      if (expected && std::abs(*expected - *actual) > 1e-12) {
        return Outcome::fail(method_name(method) + " off by " +
                             fmt(std::abs(*expected - *actual)) + " at trial " +
                             std::to_string(trial));
      }
    }
  }
  return Outcome::pass("100 vectors x 3 methods within 1e-12");
}

Outcome planted_signal_recovery() {
  const auto start = Clock::now();
  const auto eras = planted_eras(planted_config(1));

  std::size_t corr_first_total = 0, corr_first_right = 0;
  std::size_t corr_last_total = 0, corr_last_right = 0;
  std::size_t rel_first_total = 0, rel_first_right = 0;
  std::size_t rel_last_total = 0, rel_last_right = 0;
  std::size_t papers = 0;

  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto table = planted_table(seed);
    papers += table.rows.size();
    const auto series = yearly_correlation_series(table, CorrelationMethod::pearson, 30);
    const auto relcit = relative_citation_series(table, SignSplit{MetricColumn::d_w, 0.0});

    auto value_at = [](const YearSeries& s, std::int32_t year) -> std::optional<double> {
      for (const auto& p : s) {
        if (p.year == year) return p.value;
      }
      return std::nullopt;
    };
    for (std::int32_t year : eras.first) {
      if (const auto v = value_at(series, year)) {
        ++corr_first_total;
        if (*v > 0.0) ++corr_first_right;
      }
      if (const auto v = value_at(relcit.high, year)) {
        ++rel_first_total;
        if (*v > 1.0) ++rel_first_right;
      }
    }
    for (std::int32_t year : eras.last) {
      if (const auto v = value_at(series, year)) {
        ++corr_last_total;
        if (*v < 0.0) ++corr_last_right;
      }
      if (const auto v = value_at(relcit.high, year)) {
        ++rel_last_total;
        if (*v < 1.0) ++rel_last_right;
      }
    }
  }

  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "corr " << corr_first_right << "/" << corr_first_total << " pos, " << corr_last_right
         << "/" << corr_last_total << " neg; relcit " << rel_first_right << "/" << rel_first_total
         << " >1, " << rel_last_right << "/" << rel_last_total << " <1; " << papers
         << " rows total, " << fmt(elapsed) << " s";

  auto frac = [](std::size_t right, std::size_t total) {
    return total == 0 ? 0.0 : static_cast<double>(right) / static_cast<double>(total);
  };
  if (corr_first_total == 0 || corr_last_total == 0 || rel_first_total == 0 ||
      rel_last_total == 0) {
    return Outcome::fail("era with no defined years; " + detail.str());
  }
  if (frac(corr_first_right, corr_first_total) < 0.9 ||
      frac(corr_last_right, corr_last_total) < 0.9 ||
      frac(rel_first_right, rel_first_total) < 0.9 ||
      frac(rel_last_right, rel_last_total) < 0.9) {
    return Outcome::fail(detail.str());
  }
  if (elapsed >= 600.0) return Outcome::fail("runtime " + fmt(elapsed) + " s >= 600 s");
  return Outcome::pass(detail.str());
}

Outcome surrogate_narrowing() {
  const auto table = planted_table(1);
  const auto series = yearly_correlation_series(table, CorrelationMethod::pearson, 30);
  std::vector<double> empirical;
  for (const auto& p : series) {
    if (p.value) empirical.push_back(*p.value);
  }
  const double empirical_std = stddev(empirical);

  const auto trials = reshuffle_years_surrogate(table, CorrelationMethod::pearson, 30, 7, 100);
  int narrower = 0;
  for (const auto& trial : trials) {
    std::vector<double> values;
    for (const auto& p : trial) {
      if (p.corr.value) values.push_back(*p.corr.value);
    }
    if (stddev(values) < empirical_std) ++narrower;
  }
  std::ostringstream detail;
  detail << narrower << "/100 trials narrower (empirical std " << fmt(empirical_std) << ")";
  if (narrower < 95) return Outcome::fail(detail.str());
  return Outcome::pass(detail.str());
}

Outcome shift_test_noise_floor() {
  const auto cfg = planted_config(1);
  const auto table = planted_table(1);
  const auto eras = planted_eras(cfg);

  for (const auto* era : {&eras.first, &eras.last}) {
    std::vector<double> xs, ys;
    for (const auto& row : table.rows) {  // table is id-ordered
      if (std::find(era->begin(), era->end(), row.year) == era->end()) continue;
      if (!row.metrics.d_w) continue;
      xs.push_back(static_cast<double>(row.metrics.c_w));
      ys.push_back(*row.metrics.d_w);
    }
    if (xs.size() < 100) return Outcome::fail("era sample too small");
    const auto shifts = pearson_shift_test(xs, ys, 20);
    double zero = 0.0, peak = 0.0;
    for (const auto& [s, value] : shifts) {
      if (!value) return Outcome::fail("undefined shifted correlation");
      if (s == 0) zero = std::abs(*value);
      else peak = std::max(peak, std::abs(*value));
    }
    if (zero <= peak) {
      return Outcome::fail("|r(0)|=" + fmt(zero) + " not above noise " + fmt(peak));
    }
  }
  return Outcome::pass("sharp peak at shift 0 in both eras");
}

Outcome bootstrap_correctness() {
  std::mt19937_64 rng(derive_seed(777, "acceptance-boot"));
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 10 + uniform_index(rng, 991);
    std::vector<double> sample(n);
    for (auto& v : sample) {
      v = trial % 3 == 0 ? static_cast<double>(uniform_index(rng, 30))
                         : std::exp(3.0 * uniform_unit(rng));
    }
    double mean = 0.0;
    for (double v : sample) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : sample) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);  // resampling variance

    const std::size_t realizations = 10000;
    const auto dist = bootstrap_means(sample, realizations, 1000 + trial);
    double grand = 0.0;
    for (double m : dist.means) grand += m;
    grand /= static_cast<double>(dist.means.size());

    const double se = std::sqrt(var / static_cast<double>(n) /
                                static_cast<double>(realizations));
    if (std::abs(grand - mean) > 4.0 * se) {
      return Outcome::fail("trial " + std::to_string(trial) + ": |" + fmt(grand) + " - " +
                           fmt(mean) + "| > 4se=" + fmt(4.0 * se));
    }
    if (trial == 0) {
      const auto again = bootstrap_means(sample, realizations, 1000 + trial);
      if (again.means != dist.means) return Outcome::fail("seeded rerun not bit-identical");
    }
  }
  return Outcome::pass("50 samples within 4 standard errors; seeded rerun identical");
}

Outcome preferential_attachment_signature() {
  const auto start = Clock::now();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    GenConfig cfg;
    cfg.year_begin = 1970;
    cfg.year_end = 1999;
    cfg.initial_per_year = 300;
    cfg.initial_stock = 6600;  // pre-wired archive; yearly flow outgrows it
    cfg.growth = 0.15;
    cfg.refs_mean = 8;
    cfg.refs_spread = 2;
    cfg.attachment_mix = 0.9;
    cfg.copy_prob = 0.0;
    cfg.coupling = {0.0, 0.0};
    cfg.field_count = 5;
    cfg.seed = seed;
    const auto graph = generate(cfg).graph;
    const auto result = preferential_attachment_series(graph, {1, 5}, {6, 5});

    std::vector<double> years, values;
    for (const auto& p : result.correlation) {
      if (!p.value) continue;
      if (*p.value <= 0.0) {
        return Outcome::fail("seed " + std::to_string(seed) + ": year " +
                             std::to_string(p.year) + " correlation " + fmt(*p.value) +
                             " not positive");
      }
      years.push_back(static_cast<double>(p.year));
      values.push_back(*p.value);
    }
    if (years.size() < 10) return Outcome::fail("too few covered years");

    // increasing trend: positive least-squares slope and a higher last third
    double ym = 0, vm = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
      ym += years[i];
      vm += values[i];
    }
    ym /= static_cast<double>(years.size());
    vm /= static_cast<double>(years.size());
    double num = 0, den = 0;
    for (std::size_t i = 0; i < years.size(); ++i) {
      num += (years[i] - ym) * (values[i] - vm);
      den += (years[i] - ym) * (years[i] - ym);
    }
    const double slope = num / den;
    const std::size_t third = years.size() / 3;
    double first = 0, last = 0;
    for (std::size_t i = 0; i < third; ++i) first += values[i];
    for (std::size_t i = years.size() - third; i < years.size(); ++i) last += values[i];
    first /= static_cast<double>(third);
    last /= static_cast<double>(third);
    if (slope <= 0.0 || last <= first) {
      return Outcome::fail("seed " + std::to_string(seed) + ": slope " + fmt(slope) +
                           ", first-third mean " + fmt(first) + ", last-third mean " + fmt(last));
    }
  }
  return Outcome::pass("5 seeds positive and increasing, " + fmt(seconds_since(start)) + " s");
}

Outcome real_aps_reproduction() {
  const char* meta = std::getenv("CITEMETRICS_APS_META");
  if (!meta || !*meta) {
    return Outcome::skip("set CITEMETRICS_APS_META to run against the real APS corpus");
  }
  std::optional<std::filesystem::path> edges;
  if (const char* e = std::getenv("CITEMETRICS_APS_EDGES"); e && *e) edges = e;
  const auto graph = load_corpus(meta, edges).graph;
  const auto table = compute_metric_table(graph, {1, 5});

  std::vector<double> xs, ys;
  for (const auto& row : table.rows) {
    if (!row.metrics.d_w) continue;
    xs.push_back(static_cast<double>(row.metrics.c_w));
    ys.push_back(*row.metrics.d_w);
  }
  const auto overall = correlation(xs, ys, CorrelationMethod::pearson).value;
  if (!overall || std::abs(*overall - (-0.05)) > 0.02) {
    return Outcome::fail("all-years Pearson " + (overall ? fmt(*overall) : "undefined") +
                         " outside -0.05 +/- 0.02");
  }
  const auto series = yearly_correlation_series(table, CorrelationMethod::pearson, 30);
  double early = 0, late = 0;
  std::size_t n_early = 0, n_late = 0;
  for (const auto& p : series) {
    if (!p.value) continue;
    if (p.year >= 1950 && p.year <= 1965) {
      early += *p.value;
      ++n_early;
    }
    if (p.year >= 1995 && p.year <= 2008) {
      late += *p.value;
      ++n_late;
    }
  }
  if (n_early == 0 || n_late == 0) return Outcome::fail("era cohorts missing");
  early /= static_cast<double>(n_early);
  late /= static_cast<double>(n_late);
  if (early <= 0.0 || late >= 0.0) {
    return Outcome::fail("early mean " + fmt(early) + ", late mean " + fmt(late));
  }
  return Outcome::pass("overall " + fmt(*overall) + ", early " + fmt(early) + ", late " +
                       fmt(late));
}

Outcome performance_budget() {
  const auto start = Clock::now();
  GenConfig cfg;
  cfg.year_begin = 1950;
  cfg.year_end = 2009;
  cfg.initial_per_year = 2700;  // ~1e6 papers
  cfg.growth = 0.05;
  cfg.refs_mean = 8.5;
  cfg.refs_spread = 3;
  cfg.attachment_mix = 0.5;
  cfg.copy_prob = 0.25;  // ~10.5 refs/paper -> ~1e7 edges
  cfg.coupling = {0.2, 0.2};
  cfg.seed = 31337;
  const auto built = generate(cfg);
  const double gen_seconds = seconds_since(start);
  const std::uint64_t edges = built.report.edges_loaded;
  if (built.graph.corpus_size() < 1000000 || edges < 10000000) {
    return Outcome::fail("corpus too small: " + std::to_string(built.graph.corpus_size()) +
                         " papers, " + std::to_string(edges) + " edges");
  }

  const auto table_start = Clock::now();
  const auto table = compute_metric_table(built.graph, {1, 5}, {}, 8);
  const double table_seconds = seconds_since(table_start);

  struct rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak_gb = static_cast<double>(usage.ru_maxrss) / (1024.0 * 1024.0);

  // determinism across thread counts, on a year slice to stay inside budget
  MetricFilters slice;
  slice.year_range = {1990, 1992};
  const auto t2 = compute_metric_table(built.graph, {1, 5}, slice, 2);
  const auto t5 = compute_metric_table(built.graph, {1, 5}, slice, 5);
  std::ostringstream csv2, csv5;
  write_metric_csv(t2, csv2);
  write_metric_csv(t5, csv5);
  if (csv2.str() != csv5.str()) return Outcome::fail("thread count changed the output");

  std::ostringstream detail;
  detail << built.graph.corpus_size() << " papers, " << edges << " edges; table "
         << fmt(table_seconds) << " s (gen " << fmt(gen_seconds) << " s), peak rss "
         << fmt(peak_gb) << " GB, " << table.rows.size() << " rows";
  if (table_seconds >= 900.0) return Outcome::fail("table exceeded 15 min; " + detail.str());
  if (peak_gb >= 16.0) return Outcome::fail("memory exceeded 16 GB; " + detail.str());
  return Outcome::pass(detail.str());
}

}  // namespace

int main() {
  struct Criterion {
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"disruption-oracle-equivalence", disruption_oracle_equivalence},
      {"toy-ground-truth", toy_ground_truth},
      {"metric-ranges", metric_ranges},
      {"correlation-oracle", correlation_oracle},
      {"planted-signal-recovery", planted_signal_recovery},
      {"surrogate-narrowing", surrogate_narrowing},
      {"shift-test-noise-floor", shift_test_noise_floor},
      {"bootstrap-correctness", bootstrap_correctness},
      {"preferential-attachment-signature", preferential_attachment_signature},
      {"real-aps-reproduction", real_aps_reproduction},
      {"performance-budget", performance_budget},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = Outcome::fail(std::string("exception: ") + e.what());
    }
    const char* tag = outcome.status == Outcome::Status::pass
                          ? "[PASS]"
                          : outcome.status == Outcome::Status::skip ? "[SKIP]" : "[FAIL]";
    std::cout << tag << ' ' << criterion.name;
    if (!outcome.detail.empty()) std::cout << " — " << outcome.detail;
    std::cout << std::endl;
    if (outcome.status == Outcome::Status::fail) ++failures;
  }
  return failures;
}
