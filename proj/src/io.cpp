#include "hc/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "hc/coalgebras.hpp"

namespace hc {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw StructureError(path + ": " + what);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path, "missing key '" + key + "'");
  return *it;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructureError("cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw StructureError(std::string("$: malformed JSON: ") + e.what());
  }
}

void check_id(const std::string& id, const std::string& path) {
  if (id.empty()) fail(path, "empty element id");
  for (char c : id)
    if (c == '.' || c == ' ' || c == '\t' || c == '\n' || c == '\r')
      fail(path, "element id '" + id + "' contains '.' or whitespace");
}

}  // namespace

Structure parse_structure_json(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_object()) fail("$", "expected an object");

  Signature sig;
  const json& jsig = require(doc, "signature", "$");
  const json& jrels = require(jsig, "relations", "$.signature");
  if (!jrels.is_object()) fail("$.signature.relations", "expected an object");
  for (auto it = jrels.begin(); it != jrels.end(); ++it) {
    const std::string path = "$.signature.relations." + it.key();
    if (!it->is_number_integer()) fail(path, "arity must be an integer");
    int arity = it->get<int>();
    if (arity < 1) fail(path, "arity must be positive");
    if (it.key() == kIdentitySymbol) fail(path, "relation symbol 'I' is reserved");
    sig.relations.emplace(it.key(), arity);
  }
  if (jsig.contains("transitions")) {
    const json& jt = jsig["transitions"];
    if (!jt.is_array()) fail("$.signature.transitions", "expected an array");
    for (std::size_t i = 0; i < jt.size(); ++i) {
      const std::string path = "$.signature.transitions[" + std::to_string(i) + "]";
      if (!jt[i].is_string()) fail(path, "expected a string");
      const auto name = jt[i].get<std::string>();
      auto r = sig.relations.find(name);
      if (r == sig.relations.end()) fail(path, "transition '" + name + "' is not a relation");
      if (r->second != 2) fail(path, "transition '" + name + "' is not binary");
      sig.transitions.insert(name);
    }
  }

  const json& juni = require(doc, "universe", "$");
  if (!juni.is_array()) fail("$.universe", "expected an array");
  std::vector<std::string> universe;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < juni.size(); ++i) {
    const std::string path = "$.universe[" + std::to_string(i) + "]";
    if (!juni[i].is_string()) fail(path, "expected a string");
    auto id = juni[i].get<std::string>();
    check_id(id, path);
    if (!ids.insert(id).second) fail(path, "duplicate element id '" + id + "'");
    universe.push_back(std::move(id));
  }

  std::map<std::string, std::vector<std::vector<std::string>>> rels;
  if (doc.contains("relations")) {
    const json& jr = doc["relations"];
    if (!jr.is_object()) fail("$.relations", "expected an object");
    for (auto it = jr.begin(); it != jr.end(); ++it) {
      const std::string rpath = "$.relations." + it.key();
      auto sym = sig.relations.find(it.key());
      if (sym == sig.relations.end()) fail(rpath, "symbol not in signature");
      if (!it->is_array()) fail(rpath, "expected an array of tuples");
      auto& dst = rels[it.key()];
      for (std::size_t i = 0; i < it->size(); ++i) {
        const json& jt = (*it)[i];
        const std::string tpath = rpath + "[" + std::to_string(i) + "]";
        if (!jt.is_array()) fail(tpath, "expected a tuple");
        if (static_cast<int>(jt.size()) != sym->second)
          fail(tpath, "tuple length " + std::to_string(jt.size()) + " differs from arity " +
                          std::to_string(sym->second));
        std::vector<std::string> tuple;
        for (std::size_t j = 0; j < jt.size(); ++j) {
          const std::string epath = tpath + "[" + std::to_string(j) + "]";
          if (!jt[j].is_string()) fail(epath, "expected a string");
          auto id = jt[j].get<std::string>();
          if (!ids.count(id)) fail(epath, "element '" + id + "' not in universe");
          tuple.push_back(std::move(id));
        }
        dst.push_back(std::move(tuple));
      }
    }
  }

  std::vector<std::string> basepoints;
  if (doc.contains("basepoints")) {
    const json& jb = doc["basepoints"];
    if (!jb.is_array()) fail("$.basepoints", "expected an array");
    for (std::size_t i = 0; i < jb.size(); ++i) {
      const std::string path = "$.basepoints[" + std::to_string(i) + "]";
      if (!jb[i].is_string()) fail(path, "expected a string");
      auto id = jb[i].get<std::string>();
      if (!ids.count(id)) fail(path, "element '" + id + "' not in universe");
      basepoints.push_back(std::move(id));
    }
  }
  sig.num_basepoints = static_cast<int>(basepoints.size());
  return Structure::from_names(std::move(sig), std::move(universe), rels, basepoints);
}

Structure load_structure(const std::string& path) {
  try {
    return parse_structure_json(read_file(path));
  } catch (const StructureError& e) {
    throw StructureError(path + ": " + e.what());
  }
}

std::string structure_to_json(const Structure& s) {
  json doc;
  json jrels = json::object();
  for (const auto& [name, arity] : s.signature().relations) jrels[name] = arity;
  doc["signature"]["relations"] = jrels;
  doc["signature"]["transitions"] = json::array();
  for (const auto& t : s.signature().transitions) doc["signature"]["transitions"].push_back(t);
  doc["universe"] = s.universe();
  json rels = json::object();
  for (const auto& [name, tuples] : s.relations()) {
    json arr = json::array();
    for (const auto& t : tuples) {
      json jt = json::array();
      for (int e : t) jt.push_back(s.name(e));
      arr.push_back(jt);
    }
    rels[name] = arr;
  }
  doc["relations"] = rels;
  doc["basepoints"] = json::array();
  for (int b : s.basepoints()) doc["basepoints"].push_back(s.name(b));
  return doc.dump(2);
}

TreeCover parse_cover_json(std::string_view text, const Structure& base) {
  const json doc = parse_json(text);
  const json& jp = require(doc, "parent", "$");
  if (!jp.is_object()) fail("$.parent", "expected an object");
  TreeCover t{base, std::vector<int>(static_cast<std::size_t>(base.size()), -1)};
  for (auto it = jp.begin(); it != jp.end(); ++it) {
    const std::string path = "$.parent." + it.key();
    auto child = base.find(it.key());
    if (!child) fail(path, "element '" + it.key() + "' not in universe");
    if (!it->is_string()) fail(path, "expected a string");
    auto parent = base.find(it->get<std::string>());
    if (!parent) fail(path, "parent '" + it->get<std::string>() + "' not in universe");
    t.parent[*child] = *parent;
  }
  return t;
}

TreeCover load_cover(const std::string& path, const Structure& base) {
  try {
    return parse_cover_json(read_file(path), base);
  } catch (const StructureError& e) {
    throw StructureError(path + ": " + e.what());
  }
}

std::string cover_to_json(const TreeCover& t) {
  json jp = json::object();
  for (int e = 0; e < t.base.size(); ++e)
    if (t.parent[e] >= 0) jp[t.base.name(e)] = t.base.name(t.parent[e]);
  json doc;
  doc["parent"] = jp;
  return doc.dump();
}

}  // namespace hc
