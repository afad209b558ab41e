#pragma once

// Report records and their deterministic CSV / JSON serialization.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace zerodisc {

using FieldValue = std::variant<double, long long, bool, std::string>;

struct Record {
  std::string module;
  std::string name;
  std::vector<std::pair<std::string, FieldValue>> fields;

  template <class T>
  Record& set(std::string key, const T& v) {
    FieldValue value;
    if constexpr (std::is_same_v<T, bool>) {
      value = v;
    } else if constexpr (std::is_floating_point_v<T>) {
      value = static_cast<double>(v);
    } else if constexpr (std::is_integral_v<T>) {
      value = static_cast<long long>(v);
    } else {
      value = std::string(v);
    }
    for (auto& [k, old] : fields) {
      if (k == key) {
        old = std::move(value);
        return *this;
      }
    }
    fields.emplace_back(std::move(key), std::move(value));
    return *this;
  }

  const FieldValue* get(const std::string& key) const {
    for (const auto& [k, v] : fields) {
      if (k == key) return &v;
    }
    return nullptr;
  }
  double number(const std::string& key) const {
    const FieldValue* v = get(key);
    if (!v) return std::numeric_limits<double>::quiet_NaN();
    if (const auto* d = std::get_if<double>(v)) return *d;
    if (const auto* i = std::get_if<long long>(v)) return static_cast<double>(*i);
    if (const auto* b = std::get_if<bool>(v)) return *b ? 1.0 : 0.0;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct Report {
  std::string command;
  std::string config_hash;
  nlohmann::ordered_json config;
  std::vector<Record> records;
  std::vector<std::string> warnings;
  bool failed = false;  // a verification check did not pass

  Record& add(std::string module, std::string name) {
    records.push_back(Record{std::move(module), std::move(name), {}});
    return records.back();
  }

  std::vector<const Record*> find(const std::string& name) const {
    std::vector<const Record*> out;
    for (const auto& r : records) {
      if (r.name == name) out.push_back(&r);
    }
    return out;
  }
};

/// 64-bit FNV-1a, hex encoded.
inline std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

/// Shortest round-trip decimal form; non-finite values as nan / inf / -inf.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_field(const FieldValue& v) {
  struct Visitor {
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(long long i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

/// One row per record; columns command, config_hash, module, record, then the
/// union of field names in order of first appearance.
inline void write_report_csv(std::ostream& out, const Report& rep) {
  std::vector<std::string> columns;
  for (const auto& r : rep.records) {
    for (const auto& [k, v] : r.fields) {
      if (std::find(columns.begin(), columns.end(), k) == columns.end()) columns.push_back(k);
    }
  }
  out << "command,config_hash,module,record";
  for (const auto& c : columns) out << ',' << csv_escape(c);
  out << '\n';
  for (const auto& r : rep.records) {
    out << csv_escape(rep.command) << ',' << rep.config_hash << ',' << csv_escape(r.module) << ',' << csv_escape(r.name);
    for (const auto& c : columns) {
      out << ',';
      if (const FieldValue* v = r.get(c)) out << csv_escape(format_field(*v));
    }
    out << '\n';
  }
}

inline nlohmann::ordered_json field_to_json(const FieldValue& v) {
  if (const auto* d = std::get_if<double>(&v)) {
    if (!std::isfinite(*d)) return format_double(*d);
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&v)) return *i;
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  return std::get<std::string>(v);
}

inline nlohmann::ordered_json report_to_json(const Report& rep) {
  nlohmann::ordered_json doc;
  doc["command"] = rep.command;
  doc["config_hash"] = rep.config_hash;
  doc["config"] = rep.config;
  doc["warnings"] = rep.warnings;
  doc["failed"] = rep.failed;
  auto& recs = doc["records"] = nlohmann::ordered_json::array();
  for (const auto& r : rep.records) {
    nlohmann::ordered_json e;
    e["module"] = r.module;
    e["record"] = r.name;
    e["config_hash"] = rep.config_hash;
    for (const auto& [k, v] : r.fields) e[k] = field_to_json(v);
    recs.push_back(std::move(e));
  }
  return doc;
}

inline void write_report_json(std::ostream& out, const Report& rep) { out << report_to_json(rep).dump(2) << '\n'; }

}  // namespace zerodisc
