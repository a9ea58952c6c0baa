#pragma once

#include <algorithm>
#include <future>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctxalign/errors.hpp"
#include "ctxalign/ontology.hpp"
#include "ctxalign/similarity.hpp"
#include "ctxalign/version.hpp"

namespace ctxalign {

// ---------------------------------------------------------------------------
// Engine types
// ---------------------------------------------------------------------------

enum class AlignmentMode { EssentialOnly, Combined };

/// Which source count weights a matched pair: the source side's own
/// count, or the mean of both sides when the target carries counts too.
enum class WeightBasis { SourceSide, MeanOfSides };

inline const char* weight_basis_name(WeightBasis b) {
  return b == WeightBasis::SourceSide ? "source" : "mean";
}

/// Injective entity correspondence between two ontologies.
class EntityMapping {
 public:
  EntityMapping() = default;

  static EntityMapping from_pairs(
      std::vector<std::pair<EntityId, EntityId>> pairs) {
    EntityMapping m;
    for (auto& [src, tgt] : pairs) m.add(std::move(src), std::move(tgt));
    return m;
  }

  void add(EntityId source, EntityId target) {
    for (const auto& [s, t] : pairs_) {
      if (s == source) {
        throw ValidationError("mapping repeats source entity \"" +
                              source.str() + "\"");
      }
      if (t == target) {
        throw ValidationError("mapping repeats target entity \"" +
                              target.str() + "\"");
      }
    }
    pairs_.emplace_back(std::move(source), std::move(target));
    std::sort(pairs_.begin(), pairs_.end());
  }

  const std::vector<std::pair<EntityId, EntityId>>& pairs() const {
    return pairs_;
  }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

 private:
  std::vector<std::pair<EntityId, EntityId>> pairs_;  // sorted by source
};

/// Per-concept alignment outcome. Null fields mark metrics that were not
/// computed (mode) or are undefined (no weighted pairs, zero baseline).
struct ConceptAlignmentRow {
  EntityId source;
  EntityId target;
  std::optional<double> s_essential;
  std::optional<double> s_combined;
  std::optional<double> improvement;  // fraction, not percent
  std::size_t matched_essential = 0;
  std::size_t matched_contextual = 0;
  std::size_t unmatched_essential = 0;   // source side, no target left
  std::size_t unmatched_contextual = 0;
};

struct ReportMetadata {
  std::string mode;                // "essential" | "combined" | "both"
  std::string similarity_source;   // "lexical" | "overrides+lexical"
  std::string weight_basis;        // "source" | "mean"
  std::string improvement_aggregation = "per-concept mean";
  std::string tool_version = kVersion;
};

struct AlignmentReport {
  ReportMetadata metadata;
  std::vector<ConceptAlignmentRow> rows;  // ordered by source entity id
  std::optional<double> average_improvement;  // mean of defined fractions
  bool undefined_average_warning = false;     // rows exist, none defined
};

struct AlignOptions {
  bool run_essential = true;
  bool run_combined = true;
  WeightBasis weight_basis = WeightBasis::SourceSide;
  bool parallel_rows = true;
};

// ---------------------------------------------------------------------------
// Descriptor matching
// ---------------------------------------------------------------------------

/// Greedy one-to-one matching of same-kind descriptors, pooled across the
/// entities' properties. Source descriptors are visited in canonical-id
/// order; each takes the highest-scoring still-unmatched target, ties
/// broken by smallest target id. Sources left without a target become
/// unmatched pairs with similarity 0 and their own source count.
inline std::vector<MatchedPair> match_descriptors(const Entity& source,
                                                  const Entity& target,
                                                  DescriptorKind kind,
                                                  const Scorer& scorer,
                                                  WeightBasis basis) {
  const DescriptorPartition src_part = partition_descriptors(source);
  const DescriptorPartition tgt_part = partition_descriptors(target);
  const std::vector<Descriptor>& src =
      kind == DescriptorKind::Essential ? src_part.essential
                                        : src_part.contextual;
  const std::vector<Descriptor>& tgt =
      kind == DescriptorKind::Essential ? tgt_part.essential
                                        : tgt_part.contextual;

  std::vector<bool> taken(tgt.size(), false);
  std::vector<MatchedPair> pairs;
  pairs.reserve(src.size());

  for (const Descriptor& s : src) {
    std::ptrdiff_t best = -1;
    double best_score = -1.0;
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      if (taken[j]) continue;
      const double score = scorer(s, tgt[j]);
      if (score > best_score) {  // ties keep the smallest target id
        best_score = score;
        best = static_cast<std::ptrdiff_t>(j);
      }
    }
    MatchedPair pair;
    pair.source = s.id;
    pair.kind = kind;
    if (best >= 0) {
      const Descriptor& t = tgt[static_cast<std::size_t>(best)];
      taken[static_cast<std::size_t>(best)] = true;
      pair.target = t.id;
      pair.similarity = best_score;
      pair.sources =
          basis == WeightBasis::SourceSide
              ? static_cast<double>(s.source_count)
              : (static_cast<double>(s.source_count) +
                 static_cast<double>(t.source_count)) /
                    2.0;
    } else {
      pair.similarity = 0.0;
      pair.sources = static_cast<double>(s.source_count);
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Concept alignment
// ---------------------------------------------------------------------------

/// Pooled similarity of one concept pair. EssentialOnly aggregates the
/// essential matches; Combined aggregates essential plus contextual.
/// Propagates UndefinedMetricError when no weighted pairs exist.
inline double align_concept(const Entity& source, const Entity& target,
                            AlignmentMode mode, const Scorer& scorer,
                            WeightBasis basis = WeightBasis::SourceSide) {
  std::vector<MatchedPair> pairs =
      match_descriptors(source, target, DescriptorKind::Essential, scorer,
                        basis);
  if (mode == AlignmentMode::Combined) {
    std::vector<MatchedPair> ctx = match_descriptors(
        source, target, DescriptorKind::Contextual, scorer, basis);
    pairs.insert(pairs.end(), std::make_move_iterator(ctx.begin()),
                 std::make_move_iterator(ctx.end()));
  }
  return aggregate_similarity(pairs);
}

namespace detail {

inline std::optional<double> try_aggregate(
    std::span<const MatchedPair> pairs) {
  try {
    return aggregate_similarity(pairs);
  } catch (const UndefinedMetricError&) {
    return std::nullopt;
  }
}

inline ConceptAlignmentRow align_row(const Entity& source,
                                     const Entity& target,
                                     const Scorer& scorer,
                                     const AlignOptions& options) {
  const std::vector<MatchedPair> essential = match_descriptors(
      source, target, DescriptorKind::Essential, scorer, options.weight_basis);
  const std::vector<MatchedPair> contextual = match_descriptors(
      source, target, DescriptorKind::Contextual, scorer,
      options.weight_basis);

  ConceptAlignmentRow row;
  row.source = source.id;
  row.target = target.id;
  for (const MatchedPair& p : essential)
    (p.target ? row.matched_essential : row.unmatched_essential) += 1;
  for (const MatchedPair& p : contextual)
    (p.target ? row.matched_contextual : row.unmatched_contextual) += 1;

  if (options.run_essential) row.s_essential = try_aggregate(essential);
  if (options.run_combined) {
    std::vector<MatchedPair> pooled = essential;
    pooled.insert(pooled.end(), contextual.begin(), contextual.end());
    row.s_combined = try_aggregate(pooled);
  }
  if (row.s_essential && row.s_combined && *row.s_essential > 0.0) {
    row.improvement = improvement(*row.s_essential, *row.s_combined);
  }
  return row;
}

}  // namespace detail

/// Per-property aggregates of a concept pair, grouped from the same
/// pooled matching that the concept-level similarity uses.
struct PropertyAlignment {
  PropertyId property;
  std::optional<double> s_essential;
  std::optional<double> s_combined;
};

inline std::vector<PropertyAlignment> property_breakdown(
    const Entity& source, const Entity& target, const Scorer& scorer,
    WeightBasis basis = WeightBasis::SourceSide) {
  std::map<PropertyId, std::pair<std::vector<MatchedPair>,
                                 std::vector<MatchedPair>>>
      groups;
  for (MatchedPair& p : match_descriptors(source, target,
                                          DescriptorKind::Essential, scorer,
                                          basis)) {
    groups[property_of(p.source)].first.push_back(std::move(p));
  }
  for (MatchedPair& p : match_descriptors(source, target,
                                          DescriptorKind::Contextual, scorer,
                                          basis)) {
    groups[property_of(p.source)].second.push_back(std::move(p));
  }

  std::vector<PropertyAlignment> out;
  out.reserve(groups.size());
  for (auto& [prop, lists] : groups) {
    PropertyAlignment pa;
    pa.property = prop;
    pa.s_essential = detail::try_aggregate(lists.first);
    std::vector<MatchedPair> pooled = lists.first;
    pooled.insert(pooled.end(), lists.second.begin(), lists.second.end());
    pa.s_combined = detail::try_aggregate(pooled);
    out.push_back(std::move(pa));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ontology alignment
// ---------------------------------------------------------------------------

/// Pairs entities whose normalized names are equal.
inline EntityMapping default_mapping(const Ontology& a, const Ontology& b) {
  EntityMapping m;
  for (const Entity& e : a.entities) {
    if (b.find_entity(e.id) != nullptr) m.add(e.id, e.id);
  }
  return m;
}

/// Runs the full alignment over every mapped concept pair. Rows are
/// ordered by source entity id and may be computed in parallel; assembly
/// order is fixed, so the report is identical either way. The average is
/// the arithmetic mean over rows with a defined improvement; when rows
/// exist but none is defined, the report carries a warning flag instead.
inline AlignmentReport align_ontologies(const Ontology& source,
                                        const Ontology& target,
                                        const EntityMapping& mapping,
                                        const Scorer& scorer,
                                        const AlignOptions& options = {}) {
  std::vector<std::pair<const Entity*, const Entity*>> work;
  work.reserve(mapping.size());
  for (const auto& [src_id, tgt_id] : mapping.pairs()) {
    const Entity* src = source.find_entity(src_id);
    if (src == nullptr) {
      throw UnknownIdError("mapping references unknown source entity \"" +
                           src_id.str() + "\"");
    }
    const Entity* tgt = target.find_entity(tgt_id);
    if (tgt == nullptr) {
      throw UnknownIdError("mapping references unknown target entity \"" +
                           tgt_id.str() + "\"");
    }
    work.emplace_back(src, tgt);
  }

  AlignmentReport report;
  report.metadata.mode = options.run_essential && options.run_combined
                             ? "both"
                             : (options.run_essential ? "essential"
                                                      : "combined");
  report.metadata.similarity_source =
      scorer.has_overrides() ? "overrides+lexical" : "lexical";
  report.metadata.weight_basis = weight_basis_name(options.weight_basis);
  report.rows.resize(work.size());

  if (options.parallel_rows && work.size() > 1) {
    std::vector<std::future<ConceptAlignmentRow>> futures;
    futures.reserve(work.size());
    for (const auto& [src, tgt] : work) {
      futures.push_back(std::async(std::launch::async, [&, src, tgt] {
        return detail::align_row(*src, *tgt, scorer, options);
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i)
      report.rows[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < work.size(); ++i)
      report.rows[i] =
          detail::align_row(*work[i].first, *work[i].second, scorer, options);
  }

  double sum = 0.0, comp = 0.0;
  std::size_t defined = 0;
  for (const ConceptAlignmentRow& row : report.rows) {
    if (!row.improvement) continue;
    const double y = *row.improvement - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    ++defined;
  }
  if (defined > 0) {
    report.average_improvement = sum / static_cast<double>(defined);
  } else if (!report.rows.empty() && options.run_essential &&
             options.run_combined) {
    report.undefined_average_warning = true;
  }
  return report;
}

}  // namespace ctxalign
