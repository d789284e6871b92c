#include "citemetrics/graph.hpp"

#include <algorithm>
#include <stdexcept>

namespace citemetrics {

PaperIndex CitationGraph::check(PaperIndex p) const {
  if (p >= years_.size()) {
    throw std::out_of_range("paper index " + std::to_string(p) + " out of range (node count " +
                            std::to_string(years_.size()) + ")");
  }
  return p;
}

std::optional<PaperIndex> CitationGraph::find(std::string_view id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::int32_t, std::int32_t> CitationGraph::year_range() const {
  if (year_index_.empty()) return {0, 0};
  return {year_index_.begin()->first, year_index_.rbegin()->first};
}

bool CitationGraph::cites(PaperIndex citing, PaperIndex cited) const {
  auto refs = references(citing);
  check(cited);
  return std::binary_search(refs.begin(), refs.end(), cited);
}

std::vector<PaperIndex> CitationGraph::citers_in_window(PaperIndex focal,
                                                        const TimeWindow& w) const {
  const std::int32_t y = year(focal);
  std::vector<PaperIndex> out;
  if (y == kUnknownYear) return out;
  for (PaperIndex q : citers(focal)) {
    const std::int32_t qy = years_[q];
    if (qy != kUnknownYear && w.contains(y, qy)) out.push_back(q);
  }
  return out;
}

std::vector<PaperIndex> CitationGraph::subsequent_in_window(PaperIndex focal,
                                                            const TimeWindow& w) const {
  const std::int32_t y = year(focal);
  std::vector<PaperIndex> out;
  if (y == kUnknownYear) return out;
  auto focal_citers = citers(focal);
  for (PaperIndex r : references(focal)) {
    if (!in_corpus_[r]) continue;
    for (PaperIndex q : citers(r)) {
      const std::int32_t qy = years_[q];
      if (qy == kUnknownYear || !w.contains(y, qy)) continue;
      if (q == focal) continue;
      if (std::binary_search(focal_citers.begin(), focal_citers.end(), q)) continue;
      out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::size_t CitationGraph::cocitation_count(PaperIndex a, PaperIndex b,
                                            std::int32_t before_year) const {
  if (a == b) throw std::invalid_argument("cocitation_count requires two distinct papers");
  auto ca = citers(a);
  auto cb = citers(b);
  std::size_t count = 0;
  std::size_t i = 0, j = 0;
  while (i < ca.size() && j < cb.size()) {
    if (ca[i] < cb[j]) {
      ++i;
    } else if (cb[j] < ca[i]) {
      ++j;
    } else {
      const std::int32_t qy = years_[ca[i]];
      if (qy != kUnknownYear && qy < before_year) ++count;
      ++i;
      ++j;
    }
  }
  return count;
}

PaperIndex CitationGraph::Builder::intern(std::string_view id) {
  auto it = index_of_.find(id);
  if (it != index_of_.end()) return it->second;
  const PaperIndex idx = static_cast<PaperIndex>(ids_.size());
  ids_.emplace_back(id);
  index_of_.emplace(ids_.back(), idx);
  years_.push_back(kUnknownYear);
  has_record_.push_back(false);
  raw_refs_.emplace_back();
  fields_.emplace_back();
  return idx;
}

bool CitationGraph::Builder::add_paper(std::string_view id, std::int32_t year,
                                       std::span<const std::string> fields) {
  const PaperIndex idx = intern(id);
  if (has_record_[idx]) return false;
  has_record_[idx] = true;
  years_[idx] = year;
  auto& codes = fields_[idx];
  for (const std::string& f : fields) {
    if (f.empty()) continue;
    auto [it, inserted] = field_code_index_.try_emplace(f, static_cast<std::uint32_t>(
                                                               field_code_names_.size()));
    if (inserted) field_code_names_.push_back(f);
    if (std::find(codes.begin(), codes.end(), it->second) == codes.end())
      codes.push_back(it->second);
  }
  return true;
}

std::pair<CitationGraph, CitationGraph::Builder::BuildStats> CitationGraph::Builder::build() && {
  const std::size_t n = ids_.size();
  CitationGraph g;
  BuildStats stats;

  g.ids_ = std::move(ids_);
  g.index_of_ = std::move(index_of_);
  g.years_ = std::move(years_);
  g.in_corpus_ = std::move(has_record_);
  g.field_code_names_ = std::move(field_code_names_);

  g.out_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& refs = raw_refs_[i];
    std::sort(refs.begin(), refs.end());
    std::size_t kept = 0;
    for (std::size_t k = 0; k < refs.size(); ++k) {
      if (refs[k] == static_cast<PaperIndex>(i)) {
        ++stats.self_loops_dropped;
      } else if (kept > 0 && refs[kept - 1] == refs[k]) {
        ++stats.duplicate_edges_dropped;
      } else {
        refs[kept++] = refs[k];
      }
    }
    refs.resize(kept);
    g.out_offsets_[i + 1] = g.out_offsets_[i] + kept;
  }
  stats.edges = g.out_offsets_[n];

  g.out_targets_.reserve(stats.edges);
  for (std::size_t i = 0; i < n; ++i) {
    for (PaperIndex t : raw_refs_[i]) {
      g.out_targets_.push_back(t);
      if (!g.in_corpus_[t]) {
        ++stats.dangling_refs;
      } else if (g.years_[i] != kUnknownYear && g.years_[i] < g.years_[t]) {
        ++stats.backward_citations;
      }
    }
    raw_refs_[i].clear();
    raw_refs_[i].shrink_to_fit();
  }

  // In-adjacency by counting sort; scanning citing indexes in ascending order
  // leaves every citer list sorted.
  g.in_offsets_.assign(n + 1, 0);
  for (PaperIndex t : g.out_targets_) ++g.in_offsets_[t + 1];
  for (std::size_t i = 0; i < n; ++i) g.in_offsets_[i + 1] += g.in_offsets_[i];
  g.in_targets_.resize(g.out_targets_.size());
  {
    std::vector<std::uint64_t> cursor(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::uint64_t e = g.out_offsets_[i]; e < g.out_offsets_[i + 1]; ++e) {
        g.in_targets_[cursor[g.out_targets_[e]]++] = static_cast<PaperIndex>(i);
      }
    }
  }

  g.field_offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.field_offsets_[i + 1] = g.field_offsets_[i] + fields_[i].size();
  g.field_codes_.reserve(g.field_offsets_[n]);
  for (std::size_t i = 0; i < n; ++i)
    g.field_codes_.insert(g.field_codes_.end(), fields_[i].begin(), fields_[i].end());

  for (std::size_t i = 0; i < n; ++i) {
    if (!g.in_corpus_[i]) continue;
    ++g.corpus_count_;
    g.year_index_[g.years_[i]].push_back(static_cast<PaperIndex>(i));
  }

  return {std::move(g), stats};
}

}  // namespace citemetrics
