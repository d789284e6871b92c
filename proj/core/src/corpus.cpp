#include "citemetrics/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace citemetrics {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::int32_t parse_year(std::string_view field, const std::string& file, std::size_t lineno) {
  std::int32_t year = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), year);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw ParseError(file, lineno, "invalid year field '" + std::string(field) + "'");
  }
  return year;
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

LoadResult finish(CitationGraph::Builder&& builder, std::uint64_t unknown_citing) {
  auto [graph, stats] = std::move(builder).build();
  LoadResult result{std::move(graph), {}};
  auto& rep = result.report;
  rep.papers_loaded = result.graph.corpus_size();
  rep.edges_loaded = stats.edges;
  rep.dangling_refs = stats.dangling_refs;
  rep.self_loops_dropped = stats.self_loops_dropped;
  rep.duplicate_edges_dropped = stats.duplicate_edges_dropped;
  rep.backward_citations = stats.backward_citations;
  rep.unknown_citing_dropped = unknown_citing;
  auto [lo, hi] = result.graph.year_range();
  rep.year_min = lo;
  rep.year_max = hi;
  return result;
}

}  // namespace

PaperRecord parse_metadata_line(std::string_view line, const std::string& file,
                                std::size_t lineno) {
  auto cols = split(strip_cr(line), '\t');
  if (cols.size() < 2 || cols.size() > 4) {
    throw ParseError(file, lineno,
                     "expected 2-4 tab-separated fields, got " + std::to_string(cols.size()));
  }
  PaperRecord rec;
  rec.id = std::string(cols[0]);
  if (rec.id.empty()) throw ParseError(file, lineno, "empty paper id");
  rec.year = parse_year(cols[1], file, lineno);
  if (cols.size() >= 3) {
    for (auto ref : split(cols[2], ';'))
      if (!ref.empty()) rec.refs.emplace_back(ref);
  }
  if (cols.size() >= 4) {
    for (auto code : split(cols[3], ';'))
      if (!code.empty()) rec.fields.emplace_back(code);
  }
  return rec;
}

LoadResult load_corpus(const std::filesystem::path& metadata_path,
                       const std::optional<std::filesystem::path>& edges_path) {
  std::ifstream meta(metadata_path);
  if (!meta) throw IoError("cannot open metadata file: " + metadata_path.string());

  const std::string meta_name = metadata_path.string();
  CitationGraph::Builder builder;
  std::vector<std::vector<std::string>> pending_refs;

  std::string line;
  std::size_t lineno = 0;
  while (std::getline(meta, line)) {
    ++lineno;
    if (strip_cr(line).empty()) continue;
    PaperRecord rec = parse_metadata_line(line, meta_name, lineno);
    if (!builder.add_paper(rec.id, rec.year, rec.fields)) {
      throw CorpusValidationError(meta_name + ":" + std::to_string(lineno) +
                                  ": duplicate paper id '" + rec.id + "'");
    }
    pending_refs.push_back(std::move(rec.refs));
  }
  if (meta.bad()) throw IoError("I/O error while reading " + meta_name);

  // Refs resolve only after the whole metadata file is seen, so that
  // references to later records are not misclassified as dangling.
  for (std::size_t i = 0; i < pending_refs.size(); ++i) {
    for (const std::string& ref : pending_refs[i]) {
      builder.add_reference(static_cast<PaperIndex>(i), builder.intern(ref));
    }
  }
  pending_refs.clear();
  pending_refs.shrink_to_fit();

  std::uint64_t unknown_citing = 0;
  if (edges_path) {
    std::ifstream edges(*edges_path);
    if (!edges) throw IoError("cannot open edge file: " + edges_path->string());
    const std::string edges_name = edges_path->string();
    std::size_t eline = 0;
    while (std::getline(edges, line)) {
      ++eline;
      if (strip_cr(line).empty()) continue;
      auto cols = split(strip_cr(line), '\t');
      if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
        throw ParseError(edges_name, eline, "expected `citing_id<TAB>cited_id`");
      }
      // A citing id without a metadata record has no year and could never
      // enter a windowed computation; drop the edge and count it.
      if (!builder.has_record(cols[0])) {
        ++unknown_citing;
        continue;
      }
      builder.add_reference(builder.intern(cols[0]), builder.intern(cols[1]));
    }
    if (edges.bad()) throw IoError("I/O error while reading " + edges_name);
  }

  return finish(std::move(builder), unknown_citing);
}

LoadResult build_corpus(std::span<const PaperRecord> records,
                        std::span<const std::pair<std::string, std::string>> edges) {
  CitationGraph::Builder builder;
  for (const PaperRecord& rec : records) {
    if (!builder.add_paper(rec.id, rec.year, rec.fields)) {
      throw CorpusValidationError("duplicate paper id '" + rec.id + "'");
    }
  }
  for (const PaperRecord& rec : records) {
    const PaperIndex citing = builder.intern(rec.id);
    for (const std::string& ref : rec.refs) {
      builder.add_reference(citing, builder.intern(ref));
    }
  }
  std::uint64_t unknown_citing = 0;
  for (const auto& [citing_id, cited_id] : edges) {
    if (!builder.has_record(citing_id)) {
      ++unknown_citing;
      continue;
    }
    builder.add_reference(builder.intern(citing_id), builder.intern(cited_id));
  }
  return finish(std::move(builder), unknown_citing);
}

std::vector<ValidationWarning> validate_corpus(const CitationGraph& graph) {
  std::vector<ValidationWarning> warnings;
  const std::size_t n = graph.node_count();
  for (PaperIndex p = 0; p < n; ++p) {
    if (!graph.in_corpus(p)) continue;
    const std::int32_t y = graph.year(p);
    if (y < 1500 || y > 2100) {
      warnings.push_back({ValidationWarning::Kind::year_out_of_range,
                          "paper '" + graph.id(p) + "' has year " + std::to_string(y) +
                              " outside [1500, 2100]"});
    }
    for (PaperIndex r : graph.references(p)) {
      if (graph.in_corpus(r) && graph.year(r) > y) {
        warnings.push_back({ValidationWarning::Kind::backward_citation,
                            "paper '" + graph.id(p) + "' (" + std::to_string(y) + ") cites '" +
                                graph.id(r) + "' (" + std::to_string(graph.year(r)) + ")"});
      }
    }
    if (graph.references(p).empty() && graph.citers(p).empty()) {
      warnings.push_back({ValidationWarning::Kind::isolated_paper,
                          "paper '" + graph.id(p) + "' has no references and no citers"});
    }
  }
  return warnings;
}

void write_metadata(const CitationGraph& graph, std::ostream& out) {
  std::vector<PaperIndex> order;
  order.reserve(graph.corpus_size());
  for (PaperIndex p = 0; p < graph.node_count(); ++p) {
    if (graph.in_corpus(p)) order.push_back(p);
  }
  std::sort(order.begin(), order.end(),
            [&](PaperIndex a, PaperIndex b) { return graph.id(a) < graph.id(b); });

  std::vector<std::string_view> refs;
  for (PaperIndex p : order) {
    out << graph.id(p) << '\t' << graph.year(p) << '\t';
    refs.clear();
    for (PaperIndex r : graph.references(p)) refs.push_back(graph.id(r));
    std::sort(refs.begin(), refs.end());
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (i) out << ';';
      out << refs[i];
    }
    out << '\t';
    auto codes = graph.field_codes(p);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      if (i) out << ';';
      out << graph.field_code_names()[codes[i]];
    }
    out << '\n';
  }
}

void write_metadata(const CitationGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_metadata(graph, out);
  if (!out) throw IoError("write failure: " + path.string());
}

std::string IngestReport::to_json() const {
  std::ostringstream os;
  os << "{"
     << "\"papers_loaded\":" << papers_loaded << ",\"edges_loaded\":" << edges_loaded
     << ",\"dangling_refs\":" << dangling_refs << ",\"self_loops_dropped\":" << self_loops_dropped
     << ",\"duplicate_edges_dropped\":" << duplicate_edges_dropped
     << ",\"backward_citations\":" << backward_citations
     << ",\"unknown_citing_dropped\":" << unknown_citing_dropped << ",\"year_min\":" << year_min
     << ",\"year_max\":" << year_max << "}";
  return os.str();
}

namespace {

constexpr char kIndexMagic[4] = {'C', 'M', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;

template <typename T>
void write_pod(std::ostream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ostream& out, const std::vector<T>& v) {
  write_pod(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& in, std::vector<T>& v) {
  std::uint64_t n = 0;
  read_pod(in, n);
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(T)));
}

void write_str(std::ostream& out, const std::string& s) {
  write_pod(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_str(std::istream& in) {
  std::uint32_t n = 0;
  read_pod(in, n);
  std::string s(n, '\0');
  in.read(s.data(), n);
  return s;
}

}  // namespace

void save_graph_index(const CitationGraph& graph, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());

  out.write(kIndexMagic, 4);
  write_pod(out, kIndexVersion);
  const std::uint64_t n = graph.node_count();
  write_pod(out, n);

  for (PaperIndex p = 0; p < n; ++p) write_str(out, graph.id(p));

  std::vector<std::int32_t> years(n);
  std::vector<std::uint8_t> flags(n);
  for (PaperIndex p = 0; p < n; ++p) {
    years[p] = graph.year(p);
    flags[p] = graph.in_corpus(p) ? 1 : 0;
  }
  write_vec(out, years);
  write_vec(out, flags);

  write_pod(out, static_cast<std::uint64_t>(graph.field_code_names().size()));
  for (const std::string& name : graph.field_code_names()) write_str(out, name);

  std::vector<std::uint64_t> field_offsets(n + 1, 0);
  std::vector<std::uint32_t> field_codes;
  for (PaperIndex p = 0; p < n; ++p) {
    auto codes = graph.field_codes(p);
    field_codes.insert(field_codes.end(), codes.begin(), codes.end());
    field_offsets[p + 1] = field_codes.size();
  }
  write_vec(out, field_offsets);
  write_vec(out, field_codes);

  std::vector<std::uint64_t> out_offsets(n + 1, 0);
  std::vector<PaperIndex> out_targets;
  for (PaperIndex p = 0; p < n; ++p) {
    auto refs = graph.references(p);
    out_targets.insert(out_targets.end(), refs.begin(), refs.end());
    out_offsets[p + 1] = out_targets.size();
  }
  write_vec(out, out_offsets);
  write_vec(out, out_targets);

  if (!out) throw IoError("write failure: " + path.string());
}

CitationGraph load_graph_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open index file: " + path.string());

  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kIndexMagic, 4) != 0) {
    throw IoError("not a citemetrics graph index: " + path.string());
  }
  std::uint32_t version = 0;
  read_pod(in, version);
  if (version != kIndexVersion) {
    throw IoError("unsupported index version " + std::to_string(version) + " in " + path.string());
  }
  std::uint64_t n = 0;
  read_pod(in, n);
  if (!in) throw IoError("corrupt graph index: " + path.string());

  std::vector<std::string> ids(n);
  for (std::uint64_t p = 0; p < n; ++p) ids[p] = read_str(in);

  std::vector<std::int32_t> years;
  std::vector<std::uint8_t> flags;
  read_vec(in, years);
  read_vec(in, flags);

  std::uint64_t n_codes = 0;
  read_pod(in, n_codes);
  std::vector<std::string> code_names(n_codes);
  for (std::uint64_t c = 0; c < n_codes; ++c) code_names[c] = read_str(in);

  std::vector<std::uint64_t> field_offsets;
  std::vector<std::uint32_t> field_codes;
  read_vec(in, field_offsets);
  read_vec(in, field_codes);

  std::vector<std::uint64_t> out_offsets;
  std::vector<PaperIndex> out_targets;
  read_vec(in, out_offsets);
  read_vec(in, out_targets);

  if (!in || years.size() != n || flags.size() != n || field_offsets.size() != n + 1 ||
      out_offsets.size() != n + 1) {
    throw IoError("corrupt graph index: " + path.string());
  }

  // Rebuild through the Builder so derived structures (in-adjacency, year
  // index) always come from one code path.
  CitationGraph::Builder builder;
  std::vector<std::string> code_cache;
  for (std::uint64_t p = 0; p < n; ++p) {
    const PaperIndex idx = builder.intern(ids[p]);
    if (idx != p) throw IoError("corrupt graph index (duplicate id): " + path.string());
    if (flags[p]) {
      code_cache.clear();
      for (std::uint64_t c = field_offsets[p]; c < field_offsets[p + 1]; ++c) {
        code_cache.push_back(code_names.at(field_codes.at(c)));
      }
      builder.add_paper(ids[p], years[p], code_cache);
    }
  }
  for (std::uint64_t p = 0; p < n; ++p) {
    for (std::uint64_t e = out_offsets[p]; e < out_offsets[p + 1]; ++e) {
      PaperIndex t = out_targets.at(e);
      if (t >= n) throw IoError("corrupt graph index (edge target): " + path.string());
      builder.add_reference(static_cast<PaperIndex>(p), t);
    }
  }
  auto [graph, stats] = std::move(builder).build();
  (void)stats;
  return graph;
}

}  // namespace citemetrics
