#pragma once

// JSON file formats for structures and tree covers.
//
// Structure:
//   {"signature": {"relations": {"E":2,"P":1}, "transitions": ["E"]},
//    "universe": ["a","b"], "relations": {"E": [["a","b"]]}, "basepoints": ["a"]}
// Cover:
//   {"parent": {"b":"a","c":"b"}}

#include <string>
#include <string_view>

#include "hc/structures.hpp"

namespace hc {

/// Parses and validates a structure document. Errors name the JSON path of
/// the first violation, e.g. "$.relations.E[0][1]: element 'z' not in universe".
Structure parse_structure_json(std::string_view text);
Structure load_structure(const std::string& path);

/// Stable serialization (keys sorted, tuples in canonical order).
std::string structure_to_json(const Structure& s);

struct TreeCover;
TreeCover parse_cover_json(std::string_view text, const Structure& base);
TreeCover load_cover(const std::string& path, const Structure& base);
std::string cover_to_json(const TreeCover& t);

}  // namespace hc
