#pragma once

// Hand-enumerated ground-truth corpus used across unit, CLI and acceptance
// tests.
//
// Component around F (window offset 1, length 5):
//   citers of F: c1 (2001, F only), c2 (2002, F and r1), c3 (2003, F only)
//   subsequent:  s1 (2004, cites r2, not F)
//   counts (only_focal, both, subsequent) = (2, 1, 1)
//   D(F) = (2 - 1) / (2 + 1 + 1) = 0.25,  C5(F) = 3,  ra(F) = 5.0
//
// Component around G (three refs a, b, c; co-citations before 2000):
//   n_ab = 1 (q1), n_ac = 0, n_bc = 3 (q2, q3, q4)
//   rd(G) = (1/2 + 1 + 1/4) / 3

#include <string>
#include <vector>

#include "citemetrics/corpus.hpp"

namespace testsupport {

inline std::vector<citemetrics::PaperRecord> toy_records() {
  using citemetrics::PaperRecord;
  return {
      PaperRecord{"a", 1990, {}, {}},
      PaperRecord{"b", 1990, {}, {}},
      PaperRecord{"c", 1991, {}, {}},
      PaperRecord{"q1", 1992, {"a", "b"}, {}},
      PaperRecord{"q2", 1993, {"b", "c"}, {}},
      PaperRecord{"q3", 1994, {"b", "c"}, {}},
      PaperRecord{"q4", 1995, {"b", "c"}, {}},
      PaperRecord{"r1", 1995, {}, {}},
      PaperRecord{"r2", 1995, {}, {}},
      PaperRecord{"F", 2000, {"r1", "r2"}, {}},
      PaperRecord{"G", 2000, {"a", "b", "c"}, {}},
      PaperRecord{"c1", 2001, {"F"}, {}},
      PaperRecord{"c2", 2002, {"F", "r1"}, {}},
      PaperRecord{"c3", 2003, {"F"}, {}},
      PaperRecord{"s1", 2004, {"r2"}, {}},
  };
}

inline const double kToyDisruptionF = 0.25;
inline const std::size_t kToyCitationsF = 3;
inline const double kToyRefAgeF = 5.0;
inline const double kToyDiversityG = (0.5 + 1.0 + 0.25) / 3.0;

inline std::string toy_metadata_text() {
  std::string text;
  for (const auto& rec : toy_records()) {
    text += rec.id + "\t" + std::to_string(rec.year) + "\t";
    for (std::size_t i = 0; i < rec.refs.size(); ++i) {
      if (i) text += ";";
      text += rec.refs[i];
    }
    text += "\t\n";
  }
  return text;
}

}  // namespace testsupport
