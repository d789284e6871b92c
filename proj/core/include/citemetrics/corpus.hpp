#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "citemetrics/graph.hpp"

namespace citemetrics {

/// One paper as it appears in a metadata file.
struct PaperRecord {
  std::string id;
  std::int32_t year = 0;
  std::vector<std::string> refs;
  std::vector<std::string> fields;
};

struct IngestReport {
  std::uint64_t papers_loaded = 0;
  std::uint64_t edges_loaded = 0;
  std::uint64_t dangling_refs = 0;
  std::uint64_t self_loops_dropped = 0;
  std::uint64_t duplicate_edges_dropped = 0;
  std::uint64_t backward_citations = 0;
  std::uint64_t unknown_citing_dropped = 0;
  std::int32_t year_min = 0;
  std::int32_t year_max = 0;

  std::string to_json() const;
};

struct LoadResult {
  CitationGraph graph;
  IngestReport report;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what),
        file_(file),
        line_(line) {}
  const std::string& file() const { return file_; }
  std::size_t line() const { return line_; }

 private:
  std::string file_;
  std::size_t line_;
};

class CorpusValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Metadata format: UTF-8 lines `id<TAB>year<TAB>ref1;ref2;...<TAB>code1;code2;...`
/// with trailing empty fields permitted. Edge format: `citing_id<TAB>cited_id`.
/// When an edge file is given, its pairs are merged with any refs embedded in
/// the metadata records.
LoadResult load_corpus(const std::filesystem::path& metadata_path,
                       const std::optional<std::filesystem::path>& edges_path = std::nullopt);

/// Same pipeline on in-memory records (used by the synthetic generator and
/// tests). Optional extra edge pairs play the role of an edge file.
LoadResult build_corpus(std::span<const PaperRecord> records,
                        std::span<const std::pair<std::string, std::string>> edges = {});

struct ValidationWarning {
  enum class Kind { year_out_of_range, backward_citation, isolated_paper };
  Kind kind;
  std::string message;
};

std::vector<ValidationWarning> validate_corpus(const CitationGraph& graph);

/// Canonical metadata serialization: metadata-backed papers in lexicographic
/// id order, refs and codes rendered so that re-ingesting reproduces the
/// same graph and re-serializing reproduces the same bytes.
void write_metadata(const CitationGraph& graph, std::ostream& out);
void write_metadata(const CitationGraph& graph, const std::filesystem::path& path);

PaperRecord parse_metadata_line(std::string_view line, const std::string& file, std::size_t lineno);

/// Binary graph index with a versioned header; load_graph_index rejects
/// foreign or stale files.
void save_graph_index(const CitationGraph& graph, const std::filesystem::path& path);
CitationGraph load_graph_index(const std::filesystem::path& path);

}  // namespace citemetrics
