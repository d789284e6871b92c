#include "citemetrics/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "citemetrics/random.hpp"

namespace citemetrics {

std::string method_name(CorrelationMethod m) {
  switch (m) {
    case CorrelationMethod::pearson: return "pearson";
    case CorrelationMethod::spearman: return "spearman";
    case CorrelationMethod::kendall: return "kendall";
  }
  return "pearson";
}

std::optional<CorrelationMethod> parse_method(std::string_view name) {
  if (name == "pearson") return CorrelationMethod::pearson;
  if (name == "spearman") return CorrelationMethod::spearman;
  if (name == "kendall") return CorrelationMethod::kendall;
  return std::nullopt;
}

std::vector<double> average_ranks(std::span<const double> v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mean_rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

std::optional<double> pearson_value(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  return sxy / std::sqrt(sxx) / std::sqrt(syy);
}

/// Count pairs (i < j) with key[i] > key[j] by bottom-up merge sort.
std::uint64_t count_inversions(std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<double> buf(n);
  std::uint64_t inversions = 0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo + width < n; lo += 2 * width) {
      const std::size_t mid = lo + width;
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          inversions += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
      std::copy(buf.begin() + static_cast<std::ptrdiff_t>(lo),
                buf.begin() + static_cast<std::ptrdiff_t>(hi),
                v.begin() + static_cast<std::ptrdiff_t>(lo));
    }
  }
  return inversions;
}

/// Knight's O(n log n) tau-b.
std::optional<double> kendall_value(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (x[a] != x[b]) return x[a] < x[b];
    return y[a] < y[b];
  });

  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  std::uint64_t tied_x = 0, tied_both = 0;
  {
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
      const std::uint64_t t = j - i + 1;
      tied_x += t * (t - 1) / 2;
      std::size_t a = i;
      while (a <= j) {
        std::size_t b = a;
        while (b + 1 <= j && y[order[b + 1]] == y[order[a]]) ++b;
        const std::uint64_t u = b - a + 1;
        tied_both += u * (u - 1) / 2;
        a = b + 1;
      }
      i = j + 1;
    }
  }
  std::uint64_t tied_y = 0;
  {
    std::vector<double> ys(y.begin(), y.end());
    std::sort(ys.begin(), ys.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && ys[j + 1] == ys[i]) ++j;
      const std::uint64_t t = j - i + 1;
      tied_y += t * (t - 1) / 2;
      i = j + 1;
    }
  }

  // After sorting by (x, y), a y-inversion needs strictly larger x and
  // strictly smaller y, i.e. it is exactly a discordant pair.
  std::vector<double> y_sorted(n);
  for (std::size_t i = 0; i < n; ++i) y_sorted[i] = y[order[i]];
  const std::uint64_t discordant = count_inversions(y_sorted);

  const std::uint64_t denom_x = n0 - tied_x;
  const std::uint64_t denom_y = n0 - tied_y;
  if (denom_x == 0 || denom_y == 0) return std::nullopt;

  const std::uint64_t concordant = n0 - tied_x - tied_y + tied_both - discordant;
  const double numer = static_cast<double>(concordant) - static_cast<double>(discordant);
  return numer / std::sqrt(static_cast<double>(denom_x)) / std::sqrt(static_cast<double>(denom_y));
}

}  // namespace

CorrelationResult correlation(std::span<const double> x, std::span<const double> y,
                              CorrelationMethod method) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation: length mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  CorrelationResult result;
  result.method = method;
  result.n = x.size();
  switch (method) {
    case CorrelationMethod::pearson:
      result.value = pearson_value(x, y);
      break;
    case CorrelationMethod::spearman: {
      if (x.size() >= 2) {
        const auto rx = average_ranks(x);
        const auto ry = average_ranks(y);
        result.value = pearson_value(rx, ry);
      }
      break;
    }
    case CorrelationMethod::kendall:
      result.value = kendall_value(x, y);
      break;
  }
  return result;
}

CorrelationResult correlation(std::span<const std::optional<double>> x,
                              std::span<const std::optional<double>> y,
                              CorrelationMethod method) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("correlation: length mismatch (" + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()) + ")");
  }
  std::vector<double> xs, ys;
  xs.reserve(x.size());
  ys.reserve(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] && y[i]) {
      xs.push_back(*x[i]);
      ys.push_back(*y[i]);
    }
  }
  return correlation(xs, ys, method);
}

BootstrapDistribution bootstrap_means(std::span<const double> sample, std::size_t realizations,
                                      std::uint64_t seed) {
  if (sample.empty()) throw std::invalid_argument("bootstrap_means: empty sample");
  if (realizations < 1) throw std::invalid_argument("bootstrap_means: realizations must be >= 1");

  BootstrapDistribution dist;
  dist.seed = seed;
  dist.means.resize(realizations);
  const std::uint64_t n = sample.size();
  for (std::size_t r = 0; r < realizations; ++r) {
    std::mt19937_64 rng(derive_seed(seed, "bootstrap", r));
    double sum = 0.0;
    for (std::uint64_t k = 0; k < n; ++k) {
      sum += sample[uniform_index(rng, n)];
    }
    dist.means[r] = sum / static_cast<double>(n);
  }

  std::vector<double> sorted(dist.means);
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    if (sorted.size() == 1) return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
  };
  dist.q025 = quantile(0.025);
  dist.median = quantile(0.5);
  dist.q975 = quantile(0.975);
  return dist;
}

namespace {

/// Asymptotic Kolmogorov survival function Q(t) = 2 sum (-1)^{k-1} e^{-2k^2t^2},
/// truncated at 100 terms or absolute term < 1e-10.
double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-10) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");

  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double v = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == v) ++i;
    while (j < sb.size() && sb[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Tail steps cannot widen the gap beyond the last joint step.

  KsResult result;
  result.statistic = d;
  const double ne = na * nb / (na + nb);
  result.p_value = kolmogorov_q(std::sqrt(ne) * d);
  return result;
}

std::vector<std::pair<int, std::optional<double>>> pearson_shift_test(std::span<const double> x,
                                                                      std::span<const double> y,
                                                                      int max_shift) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson_shift_test: length mismatch");
  if (max_shift < 0) throw std::invalid_argument("pearson_shift_test: negative max_shift");
  const std::size_t n = x.size();
  if (2 * static_cast<std::size_t>(max_shift) >= n) {
    throw std::invalid_argument("pearson_shift_test: max_shift must be < |x|/2");
  }

  std::vector<std::pair<int, std::optional<double>>> out;
  out.reserve(2 * static_cast<std::size_t>(max_shift) + 1);
  std::vector<double> rotated(n);
  for (int s = -max_shift; s <= max_shift; ++s) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t src =
          (i + static_cast<std::size_t>(static_cast<long long>(s) + static_cast<long long>(n))) % n;
      rotated[i] = y[src];
    }
    out.emplace_back(s, pearson_value(x, rotated));
  }
  return out;
}

std::vector<YearlyCorrelations> reshuffle_years_surrogate(const MetricTable& table,
                                                          CorrelationMethod method,
                                                          std::size_t min_cohort,
                                                          std::uint64_t seed, std::size_t trials,
                                                          unsigned threads) {
  if (trials < 1) throw std::invalid_argument("reshuffle_years_surrogate: trials must be >= 1");
  if (table.rows.empty()) {
    throw std::invalid_argument("reshuffle_years_surrogate: empty metric table");
  }

  const std::size_t n = table.rows.size();
  std::vector<std::int32_t> years(n);
  for (std::size_t i = 0; i < n; ++i) years[i] = table.rows[i].year;

  std::vector<YearlyCorrelations> result(trials);
  auto run_trial = [&](std::size_t t) {
    std::mt19937_64 rng(derive_seed(seed, "surrogate", t));
    std::vector<std::int32_t> shuffled(years);
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = uniform_index(rng, i + 1);
      std::swap(shuffled[i], shuffled[j]);
    }
    std::map<std::int32_t, std::pair<std::vector<double>, std::vector<double>>> cohorts;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& m = table.rows[i].metrics;
      if (!m.d_w) continue;
      auto& [xs, ys] = cohorts[shuffled[i]];
      xs.push_back(static_cast<double>(m.c_w));
      ys.push_back(*m.d_w);
    }
    YearlyCorrelations series;
    series.reserve(cohorts.size());
    for (auto& [year, data] : cohorts) {
      CorrelationResult corr = correlation(data.first, data.second, method);
      if (corr.n < min_cohort) corr.value = std::nullopt;
      series.push_back({year, corr});
    }
    result[t] = std::move(series);
  };

  if (threads <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::thread> pool;
    const unsigned workers = std::min<unsigned>(threads, static_cast<unsigned>(trials));
    std::atomic<std::size_t> next{0};
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        while (true) {
          const std::size_t t = next.fetch_add(1);
          if (t >= trials) break;
          run_trial(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return result;
}

}  // namespace citemetrics
