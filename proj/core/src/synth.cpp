#include "citemetrics/synth.hpp"

#include <algorithm>
#include <deque>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "citemetrics/random.hpp"

namespace citemetrics {

void GenConfig::validate() const {
  if (year_end < year_begin) throw std::invalid_argument("synth: empty year range");
  if (growth < 0.0) throw std::invalid_argument("synth: growth rate must be >= 0");
  if (initial_per_year < 0.0) throw std::invalid_argument("synth: initial_per_year must be >= 0");
  if (attachment_mix < 0.0 || attachment_mix > 1.0) {
    throw std::invalid_argument("synth: attachment_mix must lie in [0, 1]");
  }
  if (copy_prob < 0.0 || copy_prob > 1.0) {
    throw std::invalid_argument("synth: copy_prob must lie in [0, 1]");
  }
  if (std::abs(coupling.start) > 1.0 || std::abs(coupling.end) > 1.0) {
    throw std::invalid_argument("synth: coupling must lie in [-1, 1]");
  }
  if (refs_mean < 0.0) throw std::invalid_argument("synth: refs_mean must be >= 0");
  if (ref_recency_years < 0) {
    throw std::invalid_argument("synth: ref_recency_years must be >= 0");
  }
  if (field_count < 0) throw std::invalid_argument("synth: field_count must be >= 0");
}

namespace {

constexpr std::size_t kRdBuckets = 4096;

/// Novelty ranks compare against papers of the last few years only; against
/// all history the rank distribution drifts as co-citation counts accumulate
/// and late cohorts lose contrast.
constexpr std::int32_t kNoveltyWindowYears = 8;

struct Fenwick {
  std::vector<std::int64_t> tree;
  std::int64_t total = 0;

  explicit Fenwick(std::size_t n) : tree(n + 1, 0) {}

  void add(std::size_t i, std::int64_t delta) {
    total += delta;
    for (++i; i < tree.size(); i += i & (~i + 1)) tree[i] += delta;
  }
  std::int64_t prefix(std::size_t i) const {  // count of buckets [0, i]
    std::int64_t s = 0;
    for (++i; i > 0; i -= i & (~i + 1)) s += tree[i];
    return s;
  }
};

std::size_t rd_bucket(double rd) {
  auto b = static_cast<std::size_t>(rd * static_cast<double>(kRdBuckets));
  return std::min(b, kRdBuckets - 1);
}

double gaussian(std::mt19937_64& rng) {
  const double u1 = 1.0 - uniform_unit(rng);  // (0, 1]
  const double u2 = uniform_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::size_t count_cocitations_below(const std::vector<PaperIndex>& a,
                                    const std::vector<PaperIndex>& b, PaperIndex limit) {
  std::size_t i = 0, j = 0, count = 0;
  while (i < a.size() && j < b.size() && a[i] < limit && b[j] < limit) {
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

}  // namespace

std::vector<PaperRecord> generate_records(const GenConfig& cfg) {
  cfg.validate();

  std::mt19937_64 rng(derive_seed(cfg.seed, "synth-gen"));

  // Field codes drawn with Zipf-like weights (k+1)^-skew.
  std::vector<double> field_cdf(static_cast<std::size_t>(cfg.field_count));
  {
    double acc = 0.0;
    for (std::size_t k = 0; k < field_cdf.size(); ++k) {
      acc += std::pow(static_cast<double>(k + 1), -cfg.field_skew);
      field_cdf[k] = acc;
    }
    for (double& v : field_cdf) v /= acc > 0.0 ? acc : 1.0;
  }
  auto draw_field = [&]() -> std::size_t {
    const double u = uniform_unit(rng);
    return static_cast<std::size_t>(
        std::lower_bound(field_cdf.begin(), field_cdf.end(), u) - field_cdf.begin());
  };

  auto papers_in_year = [&cfg](std::int32_t y) {
    auto count = static_cast<std::size_t>(std::max<long long>(
        0, std::llround(cfg.initial_per_year * std::exp(cfg.growth * (y - cfg.year_begin)))));
    if (y == cfg.year_begin) count += cfg.initial_stock;
    return count;
  };

  std::size_t expected = 0;
  for (std::int32_t y = cfg.year_begin; y <= cfg.year_end; ++y) expected += papers_in_year(y);

  std::vector<PaperRecord> records;
  records.reserve(expected);
  std::vector<std::vector<PaperIndex>> refs_of;     // dense indexes, creation order
  std::vector<std::vector<PaperIndex>> citers_of;   // appended in creation order => sorted
  std::vector<double> novelty;                      // z in [-1, 1], frozen at creation
  std::vector<PaperIndex> endpoints;                // one entry per edge target
  Fenwick rd_counts(kRdBuckets);                    // rolling window of recent rd values
  std::deque<std::pair<std::int32_t, std::vector<std::uint32_t>>> rd_year_histograms;
  refs_of.reserve(expected);
  citers_of.reserve(expected);
  novelty.reserve(expected);

  int id_width = 1;
  for (std::size_t v = expected; v >= 10; v /= 10) ++id_width;

  std::vector<PaperIndex> chosen;
  std::map<std::int32_t, PaperIndex> year_start;  // first index of each year
  for (std::int32_t y = cfg.year_begin; y <= cfg.year_end; ++y) {
    const auto n_prev = static_cast<PaperIndex>(records.size());
    year_start.emplace(y, n_prev);
    const double beta = cfg.coupling.at(y, cfg.year_begin, cfg.year_end);
    const double beta_mag = std::abs(beta);
    const std::size_t count = papers_in_year(y);

    PaperIndex recency_floor = 0;
    if (cfg.ref_recency_years > 0) {
      const auto it = year_start.lower_bound(y - cfg.ref_recency_years);
      if (it != year_start.end()) recency_floor = std::min<PaperIndex>(it->second, n_prev);
    }

    while (!rd_year_histograms.empty() &&
           rd_year_histograms.front().first <= y - kNoveltyWindowYears) {
      for (std::size_t b = 0; b < kRdBuckets; ++b) {
        const auto c = rd_year_histograms.front().second[b];
        if (c) rd_counts.add(b, -static_cast<std::int64_t>(c));
      }
      rd_year_histograms.pop_front();
    }
    rd_year_histograms.emplace_back(y, std::vector<std::uint32_t>(kRdBuckets, 0));

    for (std::size_t k = 0; k < count; ++k) {
      const auto self = static_cast<PaperIndex>(records.size());
      // Stock papers wire themselves uniformly inside the first year, so the
      // corpus starts with ordinary edge density instead of an empty archive.
      const bool is_stock = y == cfg.year_begin && k < cfg.initial_stock;
      const PaperIndex pool_lo = is_stock ? 0 : recency_floor;
      const PaperIndex pool_hi = is_stock ? self : n_prev;

      long long want = std::llround(cfg.refs_mean + cfg.refs_spread * gaussian(rng));
      const std::size_t target_refs = std::min<std::size_t>(
          static_cast<std::size_t>(std::max<long long>(0, want)), pool_hi - pool_lo);

      chosen.clear();
      auto already_chosen = [&](PaperIndex t) {
        return std::find(chosen.begin(), chosen.end(), t) != chosen.end();
      };
      auto try_add_copy = [&](PaperIndex t) {
        if (cfg.copy_prob <= 0.0 || uniform_unit(rng) >= cfg.copy_prob) return;
        const auto& parents = refs_of[t];
        if (parents.empty()) return;
        // Popularity-weighted choice among the parent's references: copying
        // then reinforces already co-cited pairs instead of manufacturing
        // co-citations for obscure ones.
        std::uint64_t mass = 0;
        for (PaperIndex r : parents) mass += citers_of[r].size() + 1;
        std::uint64_t pick = uniform_index(rng, mass);
        PaperIndex r = parents.back();
        for (PaperIndex candidate : parents) {
          const std::uint64_t w = citers_of[candidate].size() + 1;
          if (pick < w) {
            r = candidate;
            break;
          }
          pick -= w;
        }
        if (!already_chosen(r)) chosen.push_back(r);
      };

      for (std::size_t slot = 0; slot < target_refs; ++slot) {
        bool found = false;
        PaperIndex picked = 0;
        for (int attempt = 0; attempt < 64 && !found; ++attempt) {
          PaperIndex t;
          if (!is_stock && uniform_unit(rng) < cfg.attachment_mix) {
            // Weight (in-degree + 1): every eligible paper once plus one
            // entry per received citation; out-of-recency hits are rejected.
            const std::uint64_t mass = n_prev + endpoints.size();
            const std::uint64_t j = uniform_index(rng, mass);
            t = j < n_prev ? static_cast<PaperIndex>(j) : endpoints[j - n_prev];
            if (t < pool_lo) continue;
          } else {
            t = pool_lo + static_cast<PaperIndex>(uniform_index(rng, pool_hi - pool_lo));
          }
          if (!is_stock && beta_mag > 0.0 &&
              uniform_unit(rng) >= std::exp(beta * novelty[t] - beta_mag)) {
            continue;
          }
          if (already_chosen(t)) continue;
          picked = t;
          found = true;
        }
        if (!found) continue;
        chosen.push_back(picked);
        if (!is_stock) try_add_copy(picked);
      }

      // Novelty rank is frozen now: reference diversity against papers of
      // strictly earlier years, ranked among recent papers' rd values.
      double z = 0.0;
      if (chosen.size() >= 2) {
        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t i = 0; i < chosen.size(); ++i) {
          for (std::size_t j = i + 1; j < chosen.size(); ++j) {
            const std::size_t n_ij =
                count_cocitations_below(citers_of[chosen[i]], citers_of[chosen[j]], n_prev);
            sum += 1.0 / (1.0 + static_cast<double>(n_ij));
            ++pairs;
          }
        }
        const double rd = sum / static_cast<double>(pairs);
        const std::size_t bucket = rd_bucket(rd);
        if (rd_counts.total > 0) {
          const auto below = static_cast<double>(bucket > 0 ? rd_counts.prefix(bucket - 1) : 0);
          const auto equal = static_cast<double>(rd_counts.prefix(bucket)) - below;
          const double pct = (below + 0.5 * equal) / static_cast<double>(rd_counts.total);
          z = std::clamp(2.0 * pct - 1.0, -1.0, 1.0);
        }
        rd_counts.add(bucket, 1);
        rd_year_histograms.back().second[bucket] += 1;
      }
      novelty.push_back(z);

      PaperRecord rec;
      {
        std::ostringstream id;
        id << 'p';
        id.width(id_width);
        id.fill('0');
        id << self;
        rec.id = id.str();
      }
      rec.year = y;
      std::sort(chosen.begin(), chosen.end());
      rec.refs.reserve(chosen.size());
      refs_of.emplace_back(chosen);
      for (PaperIndex t : chosen) {
        endpoints.push_back(t);
        citers_of[t].push_back(self);
        std::ostringstream rid;
        rid << 'p';
        rid.width(id_width);
        rid.fill('0');
        rid << t;
        rec.refs.push_back(rid.str());
      }
      if (cfg.field_count > 0) {
        std::ostringstream code;
        code << 'f';
        code.width(3);
        code.fill('0');
        code << draw_field();
        rec.fields.push_back(code.str());
      }
      citers_of.emplace_back();
      records.push_back(std::move(rec));
    }
  }
  return records;
}

LoadResult generate(const GenConfig& cfg) {
  const auto records = generate_records(cfg);
  return build_corpus(records);
}

void write_records(std::span<const PaperRecord> records, std::ostream& out) {
  for (const PaperRecord& rec : records) {
    out << rec.id << '\t' << rec.year << '\t';
    for (std::size_t i = 0; i < rec.refs.size(); ++i) {
      if (i) out << ';';
      out << rec.refs[i];
    }
    out << '\t';
    for (std::size_t i = 0; i < rec.fields.size(); ++i) {
      if (i) out << ';';
      out << rec.fields[i];
    }
    out << '\n';
  }
}

void write_records(std::span<const PaperRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_records(records, out);
  if (!out) throw IoError("write failure: " + path.string());
}

PlantedTruth planted_truth(const GenConfig& cfg) {
  cfg.validate();
  PlantedTruth truth;
  for (std::int32_t y = cfg.year_begin; y <= cfg.year_end; ++y) {
    const double beta = cfg.coupling.at(y, cfg.year_begin, cfg.year_end);
    int sign = 0;
    if (beta >= 0.05) sign = 1;
    else if (beta <= -0.05) sign = -1;
    truth.years.push_back({y, beta, sign});
  }
  return truth;
}

std::string PlantedTruth::to_json() const {
  std::ostringstream os;
  os << "{\"years\":[";
  for (std::size_t i = 0; i < years.size(); ++i) {
    if (i) os << ',';
    os << "{\"year\":" << years[i].year << ",\"beta\":" << years[i].beta
       << ",\"expected_sign\":" << years[i].expected_sign << "}";
  }
  os << "],\"expectation\":{"
     << "\"yearly_correlation\":\"sign follows beta\","
     << "\"relative_citation_d_positive\":\"above 1 where beta > 0, below 1 where beta < 0\"}}";
  return os.str();
}

}  // namespace citemetrics
