#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "citemetrics/corpus.hpp"
#include "random_corpus.hpp"
#include "toy_corpus.hpp"

using namespace citemetrics;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& name, const std::string& content) {
  const fs::path path = fs::temp_directory_path() / name;
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("three-paper corpus loads with full counts") {
  const auto path = write_temp("cm_three.tsv",
                               "A\t2000\t\t\n"
                               "B\t2001\tA\t\n"
                               "C\t2002\tA;B\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(report.papers_loaded == 3);
  CHECK(report.edges_loaded == 3);
  CHECK(report.dangling_refs == 0);
  CHECK(report.self_loops_dropped == 0);
  CHECK(report.duplicate_edges_dropped == 0);
  CHECK(report.year_min == 2000);
  CHECK(report.year_max == 2002);
  CHECK(graph.node_count() == 3);
  CHECK(graph.corpus_size() == 3);

  const auto a = graph.find("A");
  REQUIRE(a.has_value());
  CHECK(graph.citers(*a).size() == 2);
}

TEST_CASE("dangling reference is retained in refs but flagged") {
  const auto path = write_temp("cm_dangling.tsv",
                               "A\t2000\tX\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(report.papers_loaded == 1);
  CHECK(report.dangling_refs == 1);
  CHECK(report.edges_loaded == 1);
  const auto a = graph.find("A");
  REQUIRE(a.has_value());
  REQUIRE(graph.references(*a).size() == 1);
  const PaperIndex x = graph.references(*a)[0];
  CHECK_FALSE(graph.in_corpus(x));
  CHECK(graph.year(x) == kUnknownYear);
  CHECK(graph.id(x) == "X");
}

TEST_CASE("self-loop is dropped and counted") {
  const auto path = write_temp("cm_selfloop.tsv", "B\t2001\tB\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(report.self_loops_dropped == 1);
  CHECK(report.edges_loaded == 0);
  const auto b = graph.find("B");
  REQUIRE(b.has_value());
  CHECK(graph.references(*b).empty());
}

TEST_CASE("duplicate refs are dropped and counted") {
  const auto path = write_temp("cm_dup.tsv",
                               "A\t2000\t\t\n"
                               "B\t2001\tA;A;A\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(report.duplicate_edges_dropped == 2);
  CHECK(report.edges_loaded == 1);
}

TEST_CASE("duplicate paper id is a validation error") {
  const auto path = write_temp("cm_dupid.tsv",
                               "A\t2000\t\t\n"
                               "A\t2001\t\t\n");
  CHECK_THROWS_AS(load_corpus(path), CorpusValidationError);
}

TEST_CASE("malformed line reports its line number") {
  const auto path = write_temp("cm_badline.tsv",
                               "A\t2000\t\t\n"
                               "B\tnot_a_year\t\t\n");
  try {
    load_corpus(path);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("missing file raises IoError") {
  CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.tsv"), IoError);
}

TEST_CASE("backward citation is permitted but counted") {
  const auto path = write_temp("cm_backward.tsv",
                               "B\t2001\tC\t\n"
                               "C\t2005\t\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(report.backward_citations == 1);
  CHECK(report.edges_loaded == 1);
}

TEST_CASE("separate edge file merges with embedded refs") {
  const auto meta = write_temp("cm_edge_meta.tsv",
                               "A\t2000\t\t\n"
                               "B\t2001\tA\t\n"
                               "C\t2002\t\t\n");
  const auto edges = write_temp("cm_edge_list.tsv",
                                "C\tA\n"
                                "C\tB\n"
                                "B\tA\n"  // duplicate of the embedded ref
                                "Z\tA\n");
  const auto [graph, report] = load_corpus(meta, edges);
  CHECK(report.edges_loaded == 3);
  CHECK(report.duplicate_edges_dropped == 1);
  CHECK(report.unknown_citing_dropped == 1);
  CHECK_FALSE(graph.find("Z").has_value());
}

TEST_CASE("edge file with wrong shape raises ParseError") {
  const auto meta = write_temp("cm_edge_meta2.tsv", "A\t2000\t\t\n");
  const auto edges = write_temp("cm_edge_bad.tsv", "A\n");
  CHECK_THROWS_AS(load_corpus(meta, edges), ParseError);
}

TEST_CASE("validate: clean corpus produces no warnings") {
  const auto path = write_temp("cm_clean.tsv",
                               "A\t2000\t\t\n"
                               "B\t2001\tA\t\n"
                               "C\t2002\tA;B\t\n");
  const auto [graph, report] = load_corpus(path);
  CHECK(validate_corpus(graph).empty());
}

TEST_CASE("validate: year out of range") {
  const auto result = build_corpus(std::vector<PaperRecord>{
      {"old", 1200, {}, {}},
      {"new", 2000, {"old"}, {}},
  });
  const auto warnings = validate_corpus(result.graph);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].kind == ValidationWarning::Kind::year_out_of_range);
}

TEST_CASE("validate: backward citation warning") {
  const auto result = build_corpus(std::vector<PaperRecord>{
      {"B", 2001, {"C"}, {}},
      {"C", 2005, {"B"}, {}},  // mutual so neither is isolated
  });
  const auto warnings = validate_corpus(result.graph);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].kind == ValidationWarning::Kind::backward_citation);
  CHECK(warnings[0].message.find("'B'") != std::string::npos);
}

TEST_CASE("validate: isolated paper warning") {
  const auto result = build_corpus(std::vector<PaperRecord>{
      {"A", 2000, {}, {}},
      {"B", 2001, {}, {}},
      {"C", 2002, {"B"}, {}},
  });
  const auto warnings = validate_corpus(result.graph);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].kind == ValidationWarning::Kind::isolated_paper);
  CHECK(warnings[0].message.find("'A'") != std::string::npos);
}

TEST_CASE("edges_loaded equals post-cleanup refs-list total") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto records = testsupport::random_records(seed);
    const auto [graph, report] = build_corpus(records);
    std::uint64_t total = 0;
    for (PaperIndex p = 0; p < graph.node_count(); ++p) total += graph.references(p).size();
    CHECK(report.edges_loaded == total);
  }
}

TEST_CASE("metadata round-trip reproduces the graph byte-for-byte") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const auto records = testsupport::random_records(seed);
    const auto first = build_corpus(records);

    std::ostringstream once;
    write_metadata(first.graph, once);
    const auto path = write_temp("cm_roundtrip.tsv", once.str());

    const auto second = load_corpus(path);
    std::ostringstream twice;
    write_metadata(second.graph, twice);

    CHECK(once.str() == twice.str());
    CHECK(first.graph.node_count() == second.graph.node_count());
    CHECK(first.graph.corpus_size() == second.graph.corpus_size());
    CHECK(first.report.edges_loaded == second.report.edges_loaded);
  }
}

TEST_CASE("binary index round-trip preserves every query") {
  const auto records = testsupport::random_records(7);
  const auto original = build_corpus(records).graph;
  const fs::path path = fs::temp_directory_path() / "cm_index.idx";
  save_graph_index(original, path);
  const CitationGraph loaded = load_graph_index(path);

  REQUIRE(loaded.node_count() == original.node_count());
  REQUIRE(loaded.corpus_size() == original.corpus_size());
  for (PaperIndex p = 0; p < original.node_count(); ++p) {
    CHECK(loaded.id(p) == original.id(p));
    CHECK(loaded.year(p) == original.year(p));
    CHECK(loaded.in_corpus(p) == original.in_corpus(p));
    const auto a = original.references(p);
    const auto b = loaded.references(p);
    CHECK(std::vector<PaperIndex>(a.begin(), a.end()) ==
          std::vector<PaperIndex>(b.begin(), b.end()));
    const auto fa = original.field_codes(p);
    const auto fb = loaded.field_codes(p);
    REQUIRE(fa.size() == fb.size());
    for (std::size_t i = 0; i < fa.size(); ++i) {
      CHECK(original.field_code_names()[fa[i]] == loaded.field_code_names()[fb[i]]);
    }
  }
}

TEST_CASE("index loader rejects foreign files") {
  const auto path = write_temp("cm_not_index.idx", "this is not an index");
  CHECK_THROWS_AS(load_graph_index(path), IoError);
}

TEST_CASE("toy corpus ingests with expected shape") {
  const auto result = build_corpus(testsupport::toy_records());
  CHECK(result.report.papers_loaded == 15);
  CHECK(result.report.dangling_refs == 0);
  CHECK(result.report.backward_citations == 0);
}
