#pragma once

// Sequence documents: {"points": [{"re": x, "im": y}, ...]}

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zerodisc/errors.hpp"
#include "zerodisc/sequences.hpp"

namespace zerodisc {

inline nlohmann::ordered_json sequence_to_json(const PointSequence& seq) {
  nlohmann::ordered_json pts = nlohmann::ordered_json::array();
  for (const auto& p : seq) {
    nlohmann::ordered_json e;
    e["re"] = p.re();
    e["im"] = p.im();
    pts.push_back(std::move(e));
  }
  nlohmann::ordered_json doc;
  doc["points"] = std::move(pts);
  return doc;
}

/// Validates structure, interiority and distinctness.
inline PointSequence sequence_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("points")) throw ParseError("points", "missing top-level list");
  const auto& pts = doc.at("points");
  if (!pts.is_array()) throw ParseError("points", "expected a list");
  if (pts.empty()) throw ParseError("points", "sequence is empty");
  std::vector<DiscPoint> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "points[" + std::to_string(i) + "]";
    const auto& e = pts[i];
    if (!e.is_object()) throw ParseError(where, "expected an object with re, im");
    for (const char* key : {"re", "im"}) {
      if (!e.contains(key) || !e.at(key).is_number()) throw ParseError(where + "." + key, "expected a number");
    }
    try {
      out.emplace_back(e.at("re").get<double>(), e.at("im").get<double>());
    } catch (const DomainError& err) {
      throw ParseError(where, err.what());
    }
  }
  try {
    return PointSequence(std::move(out));
  } catch (const DomainError& err) {
    throw ParseError("points", err.what());
  }
}

inline std::string write_sequence(const PointSequence& seq) { return sequence_to_json(seq).dump(2) + "\n"; }

inline PointSequence read_sequence(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // nlohmann reports "line L, column C" in its message.
    throw ParseError("document", err.what());
  }
  return sequence_from_json(doc);
}

inline PointSequence read_sequence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, "cannot open sequence file");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return read_sequence(buf.str());
  } catch (const ParseError& err) {
    throw ParseError(path + ":" + err.where(), err.detail());
  }
}

inline void write_sequence_file(const PointSequence& seq, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError(path, "cannot open for writing");
  out << write_sequence(seq);
}

}  // namespace zerodisc
