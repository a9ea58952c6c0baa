#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ctxalign/alignment.hpp"
#include "ctxalign/csv.hpp"
#include "ctxalign/errors.hpp"
#include "ctxalign/ontology.hpp"
#include "ctxalign/similarity.hpp"
#include "ctxalign/text.hpp"

namespace ctxalign::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Files and small helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(buf).str();
}

inline void write_file(const std::filesystem::path& path,
                       std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open file for writing: " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

/// FNV-1a 64-bit hash, lowercase hex. Integrity check for bundled data.
inline std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
    h >>= 4;
  }
  return out;
}

/// Locale-independent fixed-point formatting ('.' decimal separator).
inline std::string format_fixed(double value, int precision) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value,
                                 std::chars_format::fixed, precision);
  return std::string(buf, res.ptr);
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::uint64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value, 10);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    return std::nullopt;
  return value;
}

enum class TableFormat { Csv, Json };

inline TableFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? TableFormat::Json : TableFormat::Csv;
}

// ---------------------------------------------------------------------------
// Descriptor tables
// ---------------------------------------------------------------------------

namespace detail {

inline const std::vector<std::string> kTableHeader = {
    "concept", "property", "descriptor", "type", "sources"};

inline Ontology parse_descriptor_table_csv(std::string_view bytes,
                                           std::string name) {
  const std::vector<std::vector<std::string>> records = csv::parse(bytes);
  if (records.empty()) {
    throw ParseError("row 1: missing header "
                     "concept,property,descriptor,type,sources[,value]");
  }

  const std::vector<std::string>& header = records[0];
  const bool has_value = header.size() == 6;
  if (header.size() != 5 && header.size() != 6) {
    throw ParseError("row 1: expected header "
                     "concept,property,descriptor,type,sources[,value]");
  }
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string expected =
        i < 5 ? kTableHeader[i] : std::string("value");
    if (text::normalize_label(header[i]) != expected) {
      throw ParseError("row 1, field " + std::to_string(i + 1) +
                       ": expected header column \"" + expected +
                       "\", got \"" + header[i] + "\"");
    }
  }

  std::vector<DescriptorRecord> rows;
  std::map<std::string, std::size_t> seen;        // descriptor id -> row
  std::map<std::string, std::pair<std::string, std::size_t>> prop_values;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const std::vector<std::string>& rec = records[r];
    const std::string row_no = std::to_string(r + 1);
    if (rec.size() != header.size()) {
      throw ParseError("row " + row_no + ": expected " +
                       std::to_string(header.size()) + " fields, got " +
                       std::to_string(rec.size()));
    }

    DescriptorRecord row;
    row.entity = rec[0];
    row.property = rec[1];
    row.descriptor = rec[2];
    if (text::normalize_label(row.entity).empty())
      throw ParseError("row " + row_no + ", field 1: empty concept");
    if (text::normalize_label(row.property).empty())
      throw ParseError("row " + row_no + ", field 2: empty property");
    if (text::normalize_label(row.descriptor).empty())
      throw ParseError("row " + row_no + ", field 3: empty descriptor");

    const auto kind = parse_kind(rec[3]);
    if (!kind) {
      throw ParseError("row " + row_no + ", field 4: unknown type \"" +
                       rec[3] + "\" (expected formal, essential or "
                       "contextual)");
    }
    row.kind = *kind;

    const auto sources = parse_uint(rec[4]);
    if (!sources) {
      throw ParseError("row " + row_no + ", field 5: sources must be a "
                       "nonnegative base-10 integer, got \"" + rec[4] + "\"");
    }
    row.source_count = *sources;

    if (has_value && !rec[5].empty()) row.property_value = rec[5];

    const EntityId eid = make_entity_id(row.entity);
    const PropertyId pid = make_property_id(eid, row.property);
    const DescriptorId did = make_descriptor_id(pid, row.descriptor);
    if (const auto [it, inserted] = seen.emplace(did.str(), r + 1);
        !inserted) {
      throw ParseError("row " + row_no + ": duplicate descriptor \"" +
                       did.str() + "\" after normalization (first seen at "
                       "row " + std::to_string(it->second) + ")");
    }
    if (row.property_value) {
      const auto [it, inserted] =
          prop_values.emplace(pid.str(), std::pair{*row.property_value, r + 1});
      if (!inserted && it->second.first != *row.property_value) {
        throw ParseError("row " + row_no + ", field 6: value \"" +
                         *row.property_value + "\" conflicts with \"" +
                         it->second.first + "\" from row " +
                         std::to_string(it->second.second));
      }
    }
    rows.push_back(std::move(row));
  }
  return ontology_from_records(std::move(name), rows);
}

inline Ontology parse_descriptor_table_json(std::string_view bytes,
                                            std::string fallback_name) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entities") ||
      !doc["entities"].is_array()) {
    throw ParseError("ontology document must be an object with an "
                     "\"entities\" array");
  }

  std::vector<RawEntity> raw;
  std::size_t ei = 0;
  for (const json& je : doc["entities"]) {
    ++ei;
    const std::string where = "entities[" + std::to_string(ei) + "]";
    if (!je.is_object() || !je.contains("name") || !je["name"].is_string())
      throw ParseError(where + ": expected an object with a \"name\" string");
    RawEntity re;
    re.name = je["name"].get<std::string>();

    std::size_t pi = 0;
    for (const json& jp : je.value("properties", json::array())) {
      ++pi;
      const std::string pwhere =
          where + ".properties[" + std::to_string(pi) + "]";
      if (!jp.is_object() || !jp.contains("name") || !jp["name"].is_string())
        throw ParseError(pwhere + ": expected an object with a \"name\" string");
      RawProperty rp;
      rp.name = jp["name"].get<std::string>();
      if (jp.contains("value")) {
        if (!jp["value"].is_string())
          throw ParseError(pwhere + ".value: expected a string");
        rp.value = jp["value"].get<std::string>();
      }

      std::size_t di = 0;
      for (const json& jd : jp.value("descriptors", json::array())) {
        ++di;
        const std::string dwhere =
            pwhere + ".descriptors[" + std::to_string(di) + "]";
        if (!jd.is_object() || !jd.contains("label") ||
            !jd["label"].is_string())
          throw ParseError(dwhere + ": expected an object with a \"label\" "
                           "string");
        RawDescriptor rd;
        rd.label = jd["label"].get<std::string>();
        if (!jd.contains("kind") || !jd["kind"].is_string())
          throw ParseError(dwhere + ".kind: expected a string");
        const auto kind = parse_kind(jd["kind"].get<std::string>());
        if (!kind) {
          throw ParseError(dwhere + ".kind: unknown type \"" +
                           jd["kind"].get<std::string>() +
                           "\" (expected formal, essential or contextual)");
        }
        rd.kind = *kind;
        if (!jd.contains("sources") || !jd["sources"].is_number_unsigned())
          throw ParseError(dwhere + ".sources: expected a nonnegative "
                           "integer");
        rd.source_count = jd["sources"].get<std::uint64_t>();
        rp.descriptors.push_back(std::move(rd));
      }
      re.properties.push_back(std::move(rp));
    }
    raw.push_back(std::move(re));
  }

  std::string name = std::move(fallback_name);
  if (doc.contains("name") && doc["name"].is_string())
    name = doc["name"].get<std::string>();
  return build_ontology(std::move(name), raw);
}

}  // namespace detail

/// Parses a descriptor table (CSV rows or a nested JSON document) into a
/// validated ontology. `name` is used when the document carries none.
inline Ontology parse_descriptor_table(std::string_view bytes,
                                       TableFormat format,
                                       std::string name = "ontology") {
  return format == TableFormat::Csv
             ? detail::parse_descriptor_table_csv(bytes, std::move(name))
             : detail::parse_descriptor_table_json(bytes, std::move(name));
}

inline std::string write_ontology_csv(const Ontology& onto) {
  std::vector<std::vector<std::string>> records;
  records.push_back(
      {"concept", "property", "descriptor", "type", "sources", "value"});
  for (const Entity& e : onto.entities) {
    for (const Property& p : e.properties) {
      for (const Descriptor& d : p.descriptors) {
        records.push_back({e.name, p.name, d.label, kind_name(d.kind),
                           std::to_string(d.source_count), p.value});
      }
    }
  }
  return csv::write(records);
}

inline std::string write_ontology_json(const Ontology& onto) {
  json doc;
  doc["schema_version"] = 1;
  doc["name"] = onto.name;
  doc["entities"] = json::array();
  for (const Entity& e : onto.entities) {
    json je;
    je["name"] = e.name;
    je["properties"] = json::array();
    for (const Property& p : e.properties) {
      json jp;
      jp["name"] = p.name;
      jp["value"] = p.value;
      jp["descriptors"] = json::array();
      for (const Descriptor& d : p.descriptors) {
        json jd;
        jd["label"] = d.label;
        jd["kind"] = kind_name(d.kind);
        jd["sources"] = d.source_count;
        jp["descriptors"].push_back(std::move(jd));
      }
      je["properties"].push_back(std::move(jp));
    }
    doc["entities"].push_back(std::move(je));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Overrides and mappings
// ---------------------------------------------------------------------------

/// Parses an expert override file: a JSON array of {left, right, s}.
inline OverrideTable parse_overrides(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array())
    throw ParseError("override document must be a JSON array of "
                     "{left, right, s}");
  OverrideTable table;
  std::size_t i = 0;
  for (const json& jo : doc) {
    ++i;
    const std::string where = "override " + std::to_string(i);
    if (!jo.is_object() || !jo.contains("left") || !jo["left"].is_string() ||
        !jo.contains("right") || !jo["right"].is_string() ||
        !jo.contains("s") || !jo["s"].is_number()) {
      throw ParseError(where + ": expected {left: id, right: id, s: number}");
    }
    try {
      table.add(DescriptorId(jo["left"].get<std::string>()),
                DescriptorId(jo["right"].get<std::string>()),
                jo["s"].get<double>());
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return table;
}

/// Override pairs whose ids resolve in neither ontology, as warnings.
inline std::vector<std::string> dangling_override_ids(
    const OverrideTable& overrides, const Ontology& source,
    const Ontology& target) {
  const auto known = [&](const std::string& id) {
    const PropertyId prop = property_of(DescriptorId(id));
    const Property* p = source.find_property(prop);
    if (p != nullptr && p->find_descriptor(DescriptorId(id)) != nullptr)
      return true;
    p = target.find_property(prop);
    return p != nullptr && p->find_descriptor(DescriptorId(id)) != nullptr;
  };
  std::vector<std::string> warnings;
  for (const auto& [key, score] : overrides) {
    (void)score;
    if (!known(key.first))
      warnings.push_back("override id \"" + key.first +
                         "\" matches no descriptor in either ontology");
    if (!known(key.second))
      warnings.push_back("override id \"" + key.second +
                         "\" matches no descriptor in either ontology");
  }
  return warnings;
}

/// Parses an entity mapping file: a JSON array of {source, target}.
inline EntityMapping parse_mapping(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array())
    throw ParseError("mapping document must be a JSON array of "
                     "{source, target}");
  EntityMapping mapping;
  std::size_t i = 0;
  for (const json& jo : doc) {
    ++i;
    const std::string where = "mapping entry " + std::to_string(i);
    if (!jo.is_object() || !jo.contains("source") ||
        !jo["source"].is_string() || !jo.contains("target") ||
        !jo["target"].is_string()) {
      throw ParseError(where + ": expected {source: id, target: id}");
    }
    try {
      mapping.add(EntityId(jo["source"].get<std::string>()),
                  EntityId(jo["target"].get<std::string>()));
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return mapping;
}

// ---------------------------------------------------------------------------
// Alignment reports
// ---------------------------------------------------------------------------

inline constexpr int kReportSchemaVersion = 1;

inline std::string write_report_json(const AlignmentReport& report) {
  json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["metadata"] = {
      {"mode", report.metadata.mode},
      {"similarity_source", report.metadata.similarity_source},
      {"weight_basis", report.metadata.weight_basis},
      {"improvement_aggregation", report.metadata.improvement_aggregation},
      {"tool_version", report.metadata.tool_version},
  };
  doc["rows"] = json::array();
  const auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  for (const ConceptAlignmentRow& row : report.rows) {
    doc["rows"].push_back({
        {"source", row.source.str()},
        {"target", row.target.str()},
        {"s_essential", opt(row.s_essential)},
        {"s_combined", opt(row.s_combined)},
        {"improvement", opt(row.improvement)},
        {"matched_essential", row.matched_essential},
        {"matched_contextual", row.matched_contextual},
        {"unmatched_essential", row.unmatched_essential},
        {"unmatched_contextual", row.unmatched_contextual},
    });
  }
  doc["average_improvement"] = opt(report.average_improvement);
  doc["undefined_average_warning"] = report.undefined_average_warning;
  return doc.dump(2) + "\n";
}

inline AlignmentReport parse_report_json(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("schema_version", -1) != kReportSchemaVersion)
    throw ParseError("report document must carry schema_version 1");
  if (!doc.contains("rows") || !doc["rows"].is_array())
    throw ParseError("report document must carry a \"rows\" array");

  AlignmentReport report;
  const json& md = doc.value("metadata", json::object());
  report.metadata.mode = md.value("mode", "");
  report.metadata.similarity_source = md.value("similarity_source", "");
  report.metadata.weight_basis = md.value("weight_basis", "");
  report.metadata.improvement_aggregation =
      md.value("improvement_aggregation", "");
  report.metadata.tool_version = md.value("tool_version", "");

  const auto opt_number = [](const json& j, const char* key,
                             const std::string& where) -> std::optional<double> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number())
      throw ParseError(where + "." + key + ": expected a number or null");
    return j[key].get<double>();
  };

  std::size_t i = 0;
  for (const json& jr : doc["rows"]) {
    ++i;
    const std::string where = "row " + std::to_string(i);
    if (!jr.is_object() || !jr.contains("source") ||
        !jr["source"].is_string() || !jr.contains("target") ||
        !jr["target"].is_string()) {
      throw ParseError(where + ": expected source and target ids");
    }
    ConceptAlignmentRow row;
    row.source = EntityId(jr["source"].get<std::string>());
    row.target = EntityId(jr["target"].get<std::string>());
    row.s_essential = opt_number(jr, "s_essential", where);
    row.s_combined = opt_number(jr, "s_combined", where);
    row.improvement = opt_number(jr, "improvement", where);
    row.matched_essential = jr.value("matched_essential", 0U);
    row.matched_contextual = jr.value("matched_contextual", 0U);
    row.unmatched_essential = jr.value("unmatched_essential", 0U);
    row.unmatched_contextual = jr.value("unmatched_contextual", 0U);

    if (row.improvement) {
      if (!row.s_essential || !row.s_combined || !(*row.s_essential > 0.0))
        throw ParseError(where + ": improvement present without a positive "
                         "baseline");
      const double expected = (*row.s_combined - *row.s_essential) /
                              *row.s_essential;
      if (std::abs(*row.improvement - expected) > 1e-9)
        throw ParseError(where + ": improvement " +
                         format_fixed(*row.improvement, 12) +
                         " inconsistent with similarities (expected " +
                         format_fixed(expected, 12) + ")");
    }
    report.rows.push_back(std::move(row));
  }

  if (doc.contains("average_improvement") &&
      !doc["average_improvement"].is_null()) {
    if (!doc["average_improvement"].is_number())
      throw ParseError("average_improvement: expected a number or null");
    report.average_improvement = doc["average_improvement"].get<double>();

    double sum = 0.0;
    std::size_t defined = 0;
    for (const ConceptAlignmentRow& row : report.rows) {
      if (!row.improvement) continue;
      sum += *row.improvement;
      ++defined;
    }
    if (defined == 0) {
      throw ParseError("average_improvement present but no row has a "
                       "defined improvement");
    }
    const double expected = sum / static_cast<double>(defined);
    if (std::abs(*report.average_improvement - expected) > 1e-9) {
      throw ParseError("average_improvement " +
                       format_fixed(*report.average_improvement, 12) +
                       " is not the mean of the defined row improvements (" +
                       format_fixed(expected, 12) + ")");
    }
  }
  report.undefined_average_warning =
      doc.value("undefined_average_warning", false);
  return report;
}

/// CSV projection of a report: one row per concept plus a final summary
/// row with the mean improvement. Percentages carry two decimals;
/// undefined metrics render as empty fields.
inline std::string write_report_csv(const AlignmentReport& report) {
  std::vector<std::vector<std::string>> records;
  records.push_back({"concept", "s_essential", "s_combined",
                     "improvement_pct"});
  const auto fmt_s = [](const std::optional<double>& v) {
    return v ? format_fixed(*v, 6) : std::string();
  };
  const auto fmt_pct = [](const std::optional<double>& v) {
    return v ? format_fixed(*v * 100.0, 2) : std::string();
  };
  for (const ConceptAlignmentRow& row : report.rows) {
    records.push_back({row.source.str(), fmt_s(row.s_essential),
                       fmt_s(row.s_combined), fmt_pct(row.improvement)});
  }
  records.push_back(
      {"average", "", "", fmt_pct(report.average_improvement)});
  return csv::write(records);
}

enum class ReportFormat { Json, Csv };

inline std::string write_report(const AlignmentReport& report,
                                ReportFormat format) {
  return format == ReportFormat::Json ? write_report_json(report)
                                      : write_report_csv(report);
}

// ---------------------------------------------------------------------------
// Bundled reference results
// ---------------------------------------------------------------------------

struct ReferenceEntry {
  std::string name;  // concept label as published
  double pct = 0.0;
  std::string note;
};

struct ReferenceResults {
  std::vector<ReferenceEntry> improvements;  // per-concept improvement %
  std::vector<ReferenceEntry> levels;        // per-concept final level %
  double stated_overall_pct = 0.0;
  std::string stated_overall_note;
};

/// Arithmetic mean of the per-concept improvement percentages.
inline double mean_improvement_pct(const ReferenceResults& ref) {
  if (ref.improvements.empty()) {
    throw UndefinedMetricError("reference improvements table is empty");
  }
  double sum = 0.0;
  for (const ReferenceEntry& e : ref.improvements) sum += e.pct;
  return sum / static_cast<double>(ref.improvements.size());
}

/// Loads the bundled reference tables, verifying the `<file>.fnv64`
/// sidecar checksum first. Missing files raise IoError; a checksum
/// mismatch raises ChecksumError.
inline ReferenceResults load_reference_results(
    const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  const std::filesystem::path sidecar = path.string() + ".fnv64";
  std::string expected = read_file(sidecar);
  while (!expected.empty() &&
         (expected.back() == '\n' || expected.back() == '\r'))
    expected.pop_back();
  const std::string actual = fnv1a64_hex(bytes);
  if (actual != expected) {
    throw ChecksumError("reference data checksum mismatch for " +
                        path.string() + ": expected " + expected + ", got " +
                        actual);
  }

  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  const auto parse_entries = [&](const char* key, const char* pct_key) {
    std::vector<ReferenceEntry> out;
    if (!doc.contains(key) || !doc[key].is_array())
      throw ParseError(std::string("reference data: missing \"") + key +
                       "\" array");
    for (const json& jo : doc[key]) {
      if (!jo.is_object() || !jo.contains("concept") || !jo.contains(pct_key))
        throw ParseError(std::string("reference data: malformed entry in \"") +
                         key + "\"");
      out.push_back(ReferenceEntry{jo["concept"].get<std::string>(),
                                   jo[pct_key].get<double>(),
                                   jo.value("note", "")});
    }
    return out;
  };

  ReferenceResults ref;
  ref.improvements = parse_entries("improvements", "improvement_pct");
  ref.levels = parse_entries("levels", "level_pct");
  ref.stated_overall_pct = doc.value("stated_overall_improvement_pct", 0.0);
  ref.stated_overall_note = doc.value("stated_overall_note", "");
  return ref;
}

}  // namespace ctxalign::io
