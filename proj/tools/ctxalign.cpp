// Command-line front end: validation, alignment, relational queries and
// report inspection over descriptor-table ontologies.
//
// Exit codes: 0 success, 1 validation/parse error, 2 I/O error,
// 3 undefined metric (under --strict), 4 usage error.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ctxalign/ctxalign.hpp"

namespace {

using namespace ctxalign;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;
constexpr int kExitUndefined = 3;
constexpr int kExitUsage = 4;

Ontology load_ontology(const std::string& path) {
  const std::string bytes = io::read_file(path);
  const std::filesystem::path p(path);
  return io::parse_descriptor_table(bytes, io::format_for_path(p),
                                    p.stem().string());
}

/// Resolves user-facing property input: a full canonical path, or a bare
/// property name when it is unique across the ontology.
PropertyId resolve_property(const Ontology& onto, const std::string& input) {
  if (input.find('/') != std::string::npos) {
    const std::size_t slash = input.find('/');
    const EntityId entity = make_entity_id(input.substr(0, slash));
    const PropertyId id = make_property_id(entity, input.substr(slash + 1));
    if (onto.find_property(id) != nullptr) return id;
    throw UnknownIdError("unknown property id \"" + id.str() + "\"");
  }
  const std::string leaf = escape_id_component(text::normalize_label(input));
  std::vector<PropertyId> hits;
  for (const Entity& e : onto.entities)
    for (const Property& p : e.properties)
      if (p.id.leaf() == leaf) hits.push_back(p.id);
  if (hits.empty())
    throw UnknownIdError("no property named \"" + input + "\"");
  if (hits.size() > 1) {
    std::string msg = "property name \"" + input + "\" is ambiguous:";
    for (const PropertyId& id : hits) msg += " " + id.str();
    throw UnknownIdError(msg);
  }
  return hits[0];
}

std::string plural(std::size_t n, const char* one, const char* many) {
  return std::to_string(n) + " " + (n == 1 ? one : many);
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Advisory kind lints: cue words that usually signal the other
/// descriptor kind. Heuristic only; never an error.
std::vector<std::string> lint_descriptor_kinds(const Ontology& onto) {
  static const std::vector<std::string> kEssentialCues = {
      "legal", "law", "legislation", "regulation", "regulatory", "contract",
      "audit", "standard", "certification", "compliance", "policy",
      "framework", "procedure"};
  static const std::vector<std::string> kContextualCues = {
      "public", "cultural", "social", "perception", "opinion", "expectation",
      "trust", "awareness", "media", "community", "stakeholder"};
  const auto hits = [](const std::string& label,
                       const std::vector<std::string>& cues) {
    std::size_t n = 0;
    for (const std::string& token : text::tokens(label))
      if (std::find(cues.begin(), cues.end(), token) != cues.end()) ++n;
    return n;
  };

  std::vector<std::string> warnings;
  for (const Entity& e : onto.entities) {
    for (const Property& p : e.properties) {
      for (const Descriptor& d : p.descriptors) {
        const std::string norm = text::normalize_label(d.label);
        const std::size_t essential_hits = hits(norm, kEssentialCues);
        const std::size_t contextual_hits = hits(norm, kContextualCues);
        if (d.kind == DescriptorKind::Essential &&
            contextual_hits > essential_hits) {
          warnings.push_back("lint: \"" + d.id.str() +
                             "\" is typed essential but reads contextual "
                             "(perception/context cue words)");
        } else if (d.kind == DescriptorKind::Contextual &&
                   essential_hits > contextual_hits) {
          warnings.push_back("lint: \"" + d.id.str() +
                             "\" is typed contextual but reads essential "
                             "(legal/procedural cue words)");
        }
      }
    }
  }
  return warnings;
}

int run_validate(const std::string& path, bool lint) {
  const Ontology onto = load_ontology(path);
  std::size_t essential = 0, contextual = 0;
  for (const Entity& e : onto.entities) {
    const DescriptorPartition part = partition_descriptors(e);
    essential += part.essential.size();
    contextual += part.contextual.size();
  }
  std::cout << plural(onto.entities.size(), "entity", "entities") << ", "
            << plural(onto.property_count(), "property", "properties") << ", "
            << essential << " essential, " << contextual << " contextual\n";
  if (lint) {
    for (const std::string& w : lint_descriptor_kinds(onto))
      std::cerr << w << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// align
// ---------------------------------------------------------------------------

struct AlignArgs {
  std::string source;
  std::string target;
  std::string mapping;
  std::string overrides;
  std::string mode = "both";
  std::string weight_basis = "source";
  std::string out;
  std::string format = "json";
  bool strict = false;
  bool verbose = false;
  bool serial = false;
};

bool row_has_undefined_metric(const ConceptAlignmentRow& row,
                              const AlignOptions& options) {
  if (options.run_essential && !row.s_essential) return true;
  if (options.run_combined && !row.s_combined) return true;
  if (options.run_essential && options.run_combined && !row.improvement)
    return true;
  return false;
}

int run_align(const AlignArgs& args) {
  const Ontology source = load_ontology(args.source);
  const Ontology target = load_ontology(args.target);

  Scorer scorer;
  if (!args.overrides.empty()) {
    OverrideTable table = io::parse_overrides(io::read_file(args.overrides));
    const std::vector<std::string> dangling =
        io::dangling_override_ids(table, source, target);
    for (const std::string& w : dangling) std::cerr << "warning: " << w << "\n";
    if (args.strict && !dangling.empty()) {
      throw ValidationError("override file references unknown descriptor ids "
                            "(strict mode)");
    }
    scorer = Scorer(std::move(table));
  }

  const EntityMapping mapping =
      args.mapping.empty() ? default_mapping(source, target)
                           : io::parse_mapping(io::read_file(args.mapping));

  AlignOptions options;
  options.run_essential = args.mode != "combined";
  options.run_combined = args.mode != "essential";
  options.weight_basis =
      args.weight_basis == "mean" ? WeightBasis::MeanOfSides
                                  : WeightBasis::SourceSide;
  options.parallel_rows = !args.serial;

  const AlignmentReport report =
      align_ontologies(source, target, mapping, scorer, options);
  io::write_file(args.out,
                 io::write_report(report, args.format == "csv"
                                              ? io::ReportFormat::Csv
                                              : io::ReportFormat::Json));

  std::size_t undefined_rows = 0;
  for (const ConceptAlignmentRow& row : report.rows)
    if (row_has_undefined_metric(row, options)) ++undefined_rows;

  std::cout << "aligned " << plural(report.rows.size(), "concept", "concepts");
  if (report.average_improvement) {
    std::cout << ", average improvement "
              << io::format_fixed(*report.average_improvement * 100.0, 2)
              << "%";
  }
  std::cout << " -> " << args.out << "\n";

  if (args.verbose) {
    for (const auto& [src_id, tgt_id] : mapping.pairs()) {
      const Entity* src = source.find_entity(src_id);
      const Entity* tgt = target.find_entity(tgt_id);
      std::cout << src_id.str() << " per property:\n";
      for (const PropertyAlignment& pa :
           property_breakdown(*src, *tgt, scorer, options.weight_basis)) {
        const auto fmt = [](const std::optional<double>& v) {
          return v ? io::format_fixed(*v, 6) : std::string("undefined");
        };
        std::cout << "  " << pa.property.str()
                  << "  S_f=" << fmt(pa.s_essential)
                  << "  S_fc=" << fmt(pa.s_combined) << "\n";
      }
    }
  }

  if (undefined_rows > 0) {
    std::cerr << "warning: " << undefined_rows << " of " << report.rows.size()
              << " rows have undefined metrics (no weighted descriptor "
                 "pairs or zero baseline)\n";
    if (args.strict) return kExitUndefined;
  }
  if (report.undefined_average_warning) {
    std::cerr << "warning: no row has a defined improvement; average "
                 "omitted\n";
    if (args.strict) return kExitUndefined;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// query
// ---------------------------------------------------------------------------

void print_descriptor_relation(const DescriptorRelation& rel) {
  for (const DescriptorTriple& t : rel) {
    std::cout << t.property.str() << "\t" << t.descriptor.str() << "\t"
              << t.value << "\t" << kind_name(t.kind) << "\t"
              << t.source_count << "\n";
  }
}

void print_property_relation(const PropertyRelation& rel) {
  for (const PropertyTriple& t : rel) {
    std::cout << t.entity.str() << "\t" << t.property.str() << "\t" << t.value
              << "\n";
  }
}

struct QueryArgs {
  std::string in;
  std::string with;
  std::vector<std::string> entities;
  std::string property;
  std::string rel = "props";
};

int run_query(const std::string& op, const QueryArgs& args) {
  const Ontology onto = load_ontology(args.in);

  if (op == "project-props") {
    const EntityId entity = make_entity_id(args.entities.at(0));
    for (const auto& [prop, value] :
         project_property_values(property_triples(onto), entity))
      std::cout << prop.str() << "\t" << value << "\n";
  } else if (op == "project-essential") {
    const PropertyId prop = resolve_property(onto, args.property);
    for (const auto& [dsc, value] :
         project_essential_values(essential_triples(onto), prop))
      std::cout << dsc.str() << "\t" << value << "\n";
  } else if (op == "project-contextual") {
    const PropertyId prop = resolve_property(onto, args.property);
    for (const auto& [dsc, value] :
         project_contextual_values(contextual_triples(onto), prop))
      std::cout << dsc.str() << "\t" << value << "\n";
  } else if (op == "select-entities") {
    for (const auto& [a, b] : select_matching_entities(property_triples(onto)))
      std::cout << a.str() << "\t" << b.str() << "\n";
  } else if (op == "select-essential") {
    for (const auto& [a, b] :
         select_matching_by_essential(essential_triples(onto)))
      std::cout << a.str() << "\t" << b.str() << "\n";
  } else if (op == "select-contextual") {
    for (const auto& [a, b] :
         select_matching_by_contextual(contextual_triples(onto)))
      std::cout << a.str() << "\t" << b.str() << "\n";
  } else if (op == "join") {
    if (!args.property.empty()) {
      print_descriptor_relation(
          combined_description(onto, resolve_property(onto, args.property)));
    } else {
      print_descriptor_relation(
          join_descriptors(essential_triples(onto), contextual_triples(onto)));
    }
  } else if (op == "diff") {
    if (!args.with.empty()) {
      const Ontology other = load_ontology(args.with);
      if (args.rel == "props") {
        print_property_relation(relation_difference(property_triples(onto),
                                                    property_triples(other)));
      } else if (args.rel == "essential") {
        print_descriptor_relation(relation_difference(
            essential_triples(onto), essential_triples(other)));
      } else {
        print_descriptor_relation(relation_difference(
            contextual_triples(onto), contextual_triples(other)));
      }
    } else if (args.entities.size() == 2) {
      // Property/value comparison of two entities within one ontology:
      // project each entity (entity-agnostic pairs), then set-difference.
      const EntityId left = make_entity_id(args.entities[0]);
      const EntityId right = make_entity_id(args.entities[1]);
      const PropertyRelation rel = property_triples(onto);
      const auto pair_set = [&](const EntityId& e) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [prop, value] : project_property_values(rel, e))
          out.emplace_back(std::string(prop.leaf()),
                           text::normalize_label(value));
        return out;
      };
      const auto rights = pair_set(right);
      for (const auto& pair : pair_set(left)) {
        if (std::find(rights.begin(), rights.end(), pair) == rights.end())
          std::cout << pair.first << "\t" << pair.second << "\n";
      }
    } else {
      throw ValidationError(
          "diff needs either --with <file> or two --entity values");
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

std::string fmt_opt_pct(const std::optional<double>& v) {
  if (!v) return "undefined";
  const std::string s = io::format_fixed(*v * 100.0, 2);
  return (*v >= 0 ? "+" : "") + s + "%";
}

int run_report(const std::string& in, bool compare_paper,
               const std::string& reference_path) {
  const AlignmentReport report = io::parse_report_json(io::read_file(in));

  std::cout << "mode: " << report.metadata.mode
            << " | similarity: " << report.metadata.similarity_source
            << " | weights: " << report.metadata.weight_basis
            << " | improvement: " << report.metadata.improvement_aggregation
            << "\n\n";

  std::size_t width = 7;  // "concept"
  for (const ConceptAlignmentRow& row : report.rows)
    width = std::max(width, row.source.str().size());
  const auto pad = [&](const std::string& s) {
    return s + std::string(width + 2 - s.size(), ' ');
  };
  const auto fmt_s = [](const std::optional<double>& v) {
    return v ? io::format_fixed(*v, 6) : std::string("undefined");
  };

  std::cout << pad("concept") << "S_f       S_f,c     Imp\n";
  for (const ConceptAlignmentRow& row : report.rows) {
    std::cout << pad(row.source.str()) << fmt_s(row.s_essential) << "  "
              << fmt_s(row.s_combined) << "  " << fmt_opt_pct(row.improvement)
              << "\n";
  }
  std::cout << "\naverage improvement: "
            << fmt_opt_pct(report.average_improvement) << " (mean over rows "
            << "with a defined improvement)\n";
  if (report.undefined_average_warning)
    std::cout << "warning: no row has a defined improvement\n";

  if (!compare_paper) return kExitOk;

  const io::ReferenceResults ref =
      io::load_reference_results(reference_path);
  const auto find_row = [&](const std::string& name)
      -> const ConceptAlignmentRow* {
    const EntityId id(escape_id_component(text::normalize_label(name)));
    for (const ConceptAlignmentRow& row : report.rows)
      if (row.source == id) return &row;
    return nullptr;
  };

  std::cout << "\ncomparison against bundled published results:\n";
  std::cout << "  concept               this run    published   delta\n";
  for (const io::ReferenceEntry& e : ref.improvements) {
    const ConceptAlignmentRow* row = find_row(e.name);
    std::string mine = "-", delta = "-";
    if (row != nullptr && row->improvement) {
      mine = fmt_opt_pct(row->improvement);
      delta = io::format_fixed(*row->improvement * 100.0 - e.pct, 2);
      if (delta == "-0.00") delta = "0.00";
    }
    std::string label = e.name;
    label.resize(std::max<std::size_t>(label.size(), 20), ' ');
    std::cout << "  " << label << "  " << mine;
    std::cout << std::string(mine.size() < 10 ? 10 - mine.size() : 1, ' ')
              << "+" << io::format_fixed(e.pct, 2) << "%      " << delta
              << "\n";
  }
  std::cout << "\n  mean of the published per-concept improvements: "
            << io::format_fixed(io::mean_improvement_pct(ref), 2) << "%\n";
  std::cout << "  published overall average: ~"
            << io::format_fixed(ref.stated_overall_pct, 2) << "% ("
            << ref.stated_overall_note << ")\n";

  std::cout << "\n  published indicator levels (combined similarity, %):\n";
  for (const io::ReferenceEntry& e : ref.levels) {
    const ConceptAlignmentRow* row = find_row(e.name);
    std::string label = e.name;
    label.resize(std::max<std::size_t>(label.size(), 20), ' ');
    std::cout << "  " << label << "  published " << io::format_fixed(e.pct, 2)
              << "%";
    if (row != nullptr && row->s_combined) {
      std::cout << ", this run "
                << io::format_fixed(*row->s_combined * 100.0, 2) << "%";
    }
    std::cout << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ctxalign: ontology alignment with essential and contextual "
               "descriptors.\n"
               "Descriptor tables are CSV "
               "(concept,property,descriptor,type,sources[,value]) or the "
               "nested JSON ontology format; overrides and mappings are JSON "
               "arrays. All files are UTF-8."};
  app.require_subcommand(1);

  // validate
  std::string validate_path;
  bool validate_lint = false;
  CLI::App* validate =
      app.add_subcommand("validate", "Parse a descriptor table, check every "
                                     "model invariant and print summary "
                                     "counts");
  validate->add_option("file", validate_path,
                       "Descriptor table (.csv or .json)")->required();
  validate->add_flag("--lint", validate_lint,
                     "Also print advisory essential/contextual cue-word "
                     "warnings");

  // align
  AlignArgs align_args;
  CLI::App* align = app.add_subcommand(
      "align", "Align two ontologies: partition descriptors, match pairs, "
               "compute S_f (essential-only), S_f,c (combined) and the "
               "relative improvement per concept");
  align->add_option("--source", align_args.source,
                    "Source descriptor table (.csv or .json)")->required();
  align->add_option("--target", align_args.target,
                    "Target descriptor table (.csv or .json)")->required();
  align->add_option("--mapping", align_args.mapping,
                    "Entity mapping JSON [{source, target}]; defaults to "
                    "pairing entities with equal normalized names");
  align->add_option("--overrides", align_args.overrides,
                    "Expert similarity overrides JSON [{left, right, s}]");
  align->add_option("--mode", align_args.mode,
                    "Which similarities to compute")
      ->check(CLI::IsMember({"essential", "combined", "both"}))
      ->capture_default_str();
  align->add_option("--weight-basis", align_args.weight_basis,
                    "Source count used to weight a matched pair: the source "
                    "side's count, or the mean of both sides")
      ->check(CLI::IsMember({"source", "mean"}))
      ->capture_default_str();
  align->add_option("--out", align_args.out, "Report output path")->required();
  align->add_option("--format", align_args.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  align->add_flag("--strict", align_args.strict,
                  "Treat undefined metrics as errors (exit 3) and dangling "
                  "override ids as validation errors");
  align->add_flag("--verbose", align_args.verbose,
                  "Print per-property similarity breakdowns");
  align->add_flag("--serial", align_args.serial,
                  "Disable row-level parallelism (output is identical "
                  "either way)");

  // query
  CLI::App* query = app.add_subcommand(
      "query", "Run one relational operation (projections, equality "
               "selections, descriptor join, difference) on parsed "
               "ontologies");
  query->require_subcommand(1);
  QueryArgs query_args;
  const std::vector<std::string> ops = {
      "project-props",  "project-essential", "project-contextual",
      "select-entities", "select-essential", "select-contextual",
      "join",           "diff"};
  std::vector<CLI::App*> query_subs;
  for (const std::string& op : ops) {
    CLI::App* sub = query->add_subcommand(op);
    sub->add_option("--in", query_args.in, "Descriptor table")->required();
    if (op == "project-props") {
      sub->description("All (property, value) pairs of one entity");
      sub->add_option("--entity", query_args.entities, "Entity name or id")
          ->required();
    } else if (op == "project-essential" || op == "project-contextual") {
      sub->description(std::string("All (descriptor, value) pairs of one "
                                   "property from the ") +
                       (op == "project-essential" ? "essential" : "contextual") +
                       " relation");
      sub->add_option("--property", query_args.property,
                      "Property id (entity/property) or unique bare name")
          ->required();
    } else if (op == "select-entities") {
      sub->description("Entity pairs sharing an equal property value");
    } else if (op == "select-essential" || op == "select-contextual") {
      sub->description("Property pairs sharing an equal descriptor value");
    } else if (op == "join") {
      sub->description("Union of the essential and contextual descriptor "
                       "relations; restrict to one property with --property");
      sub->add_option("--property", query_args.property,
                      "Only this property's combined description");
    } else {
      sub->description("Set difference: tuples of --in absent from --with, "
                       "or property/value pairs of the first --entity absent "
                       "from the second");
      sub->add_option("--with", query_args.with, "Other descriptor table");
      sub->add_option("--entity", query_args.entities,
                      "Two entities of --in to compare (give the flag twice)");
      sub->add_option("--rel", query_args.rel, "Relation to diff")
          ->check(CLI::IsMember({"props", "essential", "contextual"}))
          ->capture_default_str();
    }
    query_subs.push_back(sub);
  }

  // report
  std::string report_in;
  std::string report_reference = "data/reference_results.json";
  bool report_compare = false;
  CLI::App* report =
      app.add_subcommand("report", "Pretty-print an alignment report");
  report->add_option("--in", report_in, "Report JSON produced by align")
      ->required();
  report->add_flag("--compare-paper", report_compare,
                   "Also print side-by-side deltas against the bundled "
                   "published reference results");
  report->add_option("--reference", report_reference,
                     "Reference results JSON (with .fnv64 sidecar)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (validate->parsed()) return run_validate(validate_path, validate_lint);
    if (align->parsed()) return run_align(align_args);
    if (query->parsed()) {
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (query_subs[i]->parsed()) return run_query(ops[i], query_args);
    }
    if (report->parsed())
      return run_report(report_in, report_compare, report_reference);
  } catch (const UndefinedMetricError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUndefined;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
