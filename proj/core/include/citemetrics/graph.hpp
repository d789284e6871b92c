#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace citemetrics {

using PaperIndex = std::uint32_t;

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};
using IdMap = std::unordered_map<std::string, PaperIndex, StringHash, std::equal_to<>>;

/// Publication year of a paper that is referenced but carries no metadata
/// record of its own.
inline constexpr std::int32_t kUnknownYear = std::numeric_limits<std::int32_t>::min();

/// Calendar-year window relative to a focal paper's publication year.
/// The counted years are [focal + offset, focal + offset + length - 1].
struct TimeWindow {
  int offset = 1;
  int length = 5;

  bool valid() const { return length >= 1 && offset >= 0; }
  int first_year(int focal_year) const { return focal_year + offset; }
  int last_year(int focal_year) const { return focal_year + offset + length - 1; }
  bool contains(int focal_year, int candidate_year) const {
    return candidate_year >= first_year(focal_year) && candidate_year <= last_year(focal_year);
  }
  bool overlaps(const TimeWindow& other) const {
    return offset <= other.offset + other.length - 1 && other.offset <= offset + length - 1;
  }
  bool operator==(const TimeWindow&) const = default;
};

/// Immutable citation-graph index. Node identifiers are opaque strings mapped
/// to dense indexes; papers that are referenced but have no metadata record
/// ("dangling" targets) are kept as placeholder nodes with kUnknownYear.
/// Adjacency lists are sorted ascending by dense index, and out/in lists are
/// mutually consistent. All queries are read-only and safe to call
/// concurrently once the graph is built.
class CitationGraph {
 public:
  class Builder;

  std::size_t node_count() const { return years_.size(); }
  std::size_t corpus_size() const { return corpus_count_; }

  bool in_corpus(PaperIndex p) const { return in_corpus_[check(p)]; }
  std::int32_t year(PaperIndex p) const { return years_[check(p)]; }
  const std::string& id(PaperIndex p) const { return ids_[check(p)]; }
  std::optional<PaperIndex> find(std::string_view id) const;

  /// References cited by p (out-adjacency, may include dangling targets).
  std::span<const PaperIndex> references(PaperIndex p) const {
    return row(out_offsets_, out_targets_, check(p));
  }
  /// Papers citing p (in-adjacency; always metadata-backed papers).
  std::span<const PaperIndex> citers(PaperIndex p) const {
    return row(in_offsets_, in_targets_, check(p));
  }
  /// Field codes of p as indexes into field_code_names().
  std::span<const std::uint32_t> field_codes(PaperIndex p) const {
    return {field_codes_.data() + field_offsets_[check(p)],
            field_offsets_[p + 1] - field_offsets_[p]};
  }
  const std::vector<std::string>& field_code_names() const { return field_code_names_; }

  /// Metadata-backed papers grouped by publication year, each group sorted.
  const std::map<std::int32_t, std::vector<PaperIndex>>& papers_by_year() const {
    return year_index_;
  }
  /// (min, max) publication year over metadata-backed papers.
  std::pair<std::int32_t, std::int32_t> year_range() const;

  /// Citing papers of `focal` published within `w`; sorted ascending.
  std::vector<PaperIndex> citers_in_window(PaperIndex focal, const TimeWindow& w) const;

  /// Papers published within `w` (relative to focal's year) that cite at
  /// least one metadata-backed reference of focal but do not cite focal
  /// itself; sorted, deduplicated, focal excluded.
  std::vector<PaperIndex> subsequent_in_window(PaperIndex focal, const TimeWindow& w) const;

  /// Number of papers published before `before_year` citing both a and b.
  std::size_t cocitation_count(PaperIndex a, PaperIndex b, std::int32_t before_year) const;

  bool cites(PaperIndex citing, PaperIndex cited) const;

 private:
  friend class Builder;

  PaperIndex check(PaperIndex p) const;
  static std::span<const PaperIndex> row(const std::vector<std::uint64_t>& offsets,
                                         const std::vector<PaperIndex>& targets, PaperIndex p) {
    return {targets.data() + offsets[p], offsets[p + 1] - offsets[p]};
  }

  std::vector<std::string> ids_;
  IdMap index_of_;
  std::vector<std::int32_t> years_;
  std::vector<bool> in_corpus_;
  std::size_t corpus_count_ = 0;

  std::vector<std::uint64_t> out_offsets_;
  std::vector<PaperIndex> out_targets_;
  std::vector<std::uint64_t> in_offsets_;
  std::vector<PaperIndex> in_targets_;

  std::vector<std::uint64_t> field_offsets_;
  std::vector<std::uint32_t> field_codes_;
  std::vector<std::string> field_code_names_;

  std::map<std::int32_t, std::vector<PaperIndex>> year_index_;
};

/// Incremental construction; edge cleanup (duplicate and self-loop removal)
/// happens in build() and is reported in BuildStats.
class CitationGraph::Builder {
 public:
  struct BuildStats {
    std::uint64_t edges = 0;
    std::uint64_t self_loops_dropped = 0;
    std::uint64_t duplicate_edges_dropped = 0;
    std::uint64_t backward_citations = 0;
    std::uint64_t dangling_refs = 0;
  };

  /// Returns the dense index for `id`, creating a placeholder node on first
  /// sight.
  PaperIndex intern(std::string_view id);

  /// Registers the metadata record for `id`. Returns false if a record for
  /// this id was already added.
  bool add_paper(std::string_view id, std::int32_t year, std::span<const std::string> fields);

  /// Records a raw reference; cleanup is deferred to build().
  void add_reference(PaperIndex citing, PaperIndex cited) { raw_refs_[citing].push_back(cited); }

  bool has_record(std::string_view id) const {
    auto it = index_of_.find(id);
    return it != index_of_.end() && has_record_[it->second];
  }

  std::size_t paper_count() const { return years_.size(); }

  std::pair<CitationGraph, BuildStats> build() &&;

 private:
  std::vector<std::string> ids_;
  IdMap index_of_;
  std::vector<std::int32_t> years_;
  std::vector<bool> has_record_;
  std::vector<std::vector<PaperIndex>> raw_refs_;
  std::vector<std::vector<std::uint32_t>> fields_;
  std::vector<std::string> field_code_names_;
  std::unordered_map<std::string, std::uint32_t> field_code_index_;
};

}  // namespace citemetrics
