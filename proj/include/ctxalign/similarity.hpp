#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxalign/errors.hpp"
#include "ctxalign/ontology.hpp"
#include "ctxalign/text.hpp"

namespace ctxalign {

// ---------------------------------------------------------------------------
// Lexical similarity
// ---------------------------------------------------------------------------

/// Deterministic symmetric score in [0, 1]:
///   s = clamp(0.5 * jaccard(tokens) + 0.5 * (1 - edit/maxlen), 0, 1)
/// over normalized inputs, and exactly 1 when they normalize equal.
inline double lexical_similarity(std::string_view a, std::string_view b) {
  const std::string na = text::normalize_label(a);
  const std::string nb = text::normalize_label(b);
  if (na == nb) return 1.0;
  if (na.empty() || nb.empty()) return 0.0;

  const std::vector<std::string> ta = text::tokens(na);
  const std::vector<std::string> tb = text::tokens(nb);
  const std::set<std::string> sa(ta.begin(), ta.end());
  const std::set<std::string> sb(tb.begin(), tb.end());
  std::size_t common = 0;
  for (const std::string& t : sa) common += sb.count(t);
  const std::size_t total = sa.size() + sb.size() - common;
  const double jaccard =
      total == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(total);

  const std::size_t len =
      std::max(text::codepoint_count(na), text::codepoint_count(nb));
  const double edit =
      1.0 - static_cast<double>(text::edit_distance(na, nb)) /
                static_cast<double>(len);

  return std::clamp(0.5 * jaccard + 0.5 * edit, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Expert override table
// ---------------------------------------------------------------------------

/// Expert-supplied similarity scores for specific descriptor pairs.
/// Scores are validated to [0, 1] on insertion; duplicate keys are
/// rejected. Lookup tries both pair orientations.
class OverrideTable {
 public:
  using Key = std::pair<std::string, std::string>;

  void add(const DescriptorId& left, const DescriptorId& right, double score) {
    if (!(score >= 0.0 && score <= 1.0)) {
      throw ValidationError("override score " + std::to_string(score) +
                            " for (" + left.str() + ", " + right.str() +
                            ") is outside [0, 1]");
    }
    const auto [it, inserted] =
        scores_.emplace(Key{left.str(), right.str()}, score);
    (void)it;
    if (!inserted) {
      throw ValidationError("duplicate override key (" + left.str() + ", " +
                            right.str() + ")");
    }
  }

  std::optional<double> lookup(const DescriptorId& a,
                               const DescriptorId& b) const {
    if (const auto it = scores_.find(Key{a.str(), b.str()});
        it != scores_.end())
      return it->second;
    if (const auto it = scores_.find(Key{b.str(), a.str()});
        it != scores_.end())
      return it->second;
    return std::nullopt;
  }

  std::size_t size() const { return scores_.size(); }
  bool empty() const { return scores_.empty(); }
  auto begin() const { return scores_.begin(); }
  auto end() const { return scores_.end(); }

 private:
  std::map<Key, double> scores_;
};

/// Expert score for the pair when one exists, lexical similarity of the
/// ids' local labels otherwise.
inline double resolve_similarity(const DescriptorId& left,
                                 const DescriptorId& right,
                                 const OverrideTable& overrides) {
  if (const auto s = overrides.lookup(left, right)) return *s;
  return lexical_similarity(unescape_id_component(left.leaf()),
                            unescape_id_component(right.leaf()));
}

/// Deterministic descriptor-pair scorer: expert override first, lexical
/// fallback on the raw labels.
class Scorer {
 public:
  Scorer() = default;
  explicit Scorer(OverrideTable overrides) : overrides_(std::move(overrides)) {}

  double operator()(const Descriptor& a, const Descriptor& b) const {
    if (const auto s = overrides_.lookup(a.id, b.id)) return *s;
    return lexical_similarity(a.label, b.label);
  }

  const OverrideTable& overrides() const { return overrides_; }
  bool has_overrides() const { return !overrides_.empty(); }

 private:
  OverrideTable overrides_;
};

// ---------------------------------------------------------------------------
// Matched pairs and aggregation
// ---------------------------------------------------------------------------

/// One source descriptor with its matched target (absent when unmatched,
/// in which case similarity is 0). `sources` is the pair's source-count
/// weight basis.
struct MatchedPair {
  DescriptorId source;
  std::optional<DescriptorId> target;
  DescriptorKind kind = DescriptorKind::Essential;
  double similarity = 0.0;
  double sources = 0.0;
};

struct WeightedValue {
  double value = 0.0;
  double weight = 0.0;
};

/// Weighted mean with compensated (Kahan) summation in the order given.
/// Throws UndefinedMetricError when there are no entries or the total
/// weight is zero.
inline double weighted_mean(std::span<const WeightedValue> entries) {
  if (entries.empty()) {
    throw UndefinedMetricError("weighted mean of an empty list is undefined");
  }
  double num = 0.0, num_c = 0.0;
  double den = 0.0, den_c = 0.0;
  for (const WeightedValue& e : entries) {
    if (!std::isfinite(e.value) || !std::isfinite(e.weight) || e.weight < 0.0) {
      throw DomainError("weighted mean requires finite values and "
                        "nonnegative weights");
    }
    double y = e.value * e.weight - num_c;
    double t = num + y;
    num_c = (t - num) - y;
    num = t;
    y = e.weight - den_c;
    t = den + y;
    den_c = (t - den) - y;
    den = t;
  }
  if (den == 0.0) {
    throw UndefinedMetricError(
        "all weights are zero; weighted mean is undefined");
  }
  return num / den;
}

namespace detail {

inline std::vector<const MatchedPair*> canonical_pair_order(
    std::span<const MatchedPair> pairs) {
  std::vector<const MatchedPair*> order;
  order.reserve(pairs.size());
  for (const MatchedPair& p : pairs) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(),
                   [](const MatchedPair* a, const MatchedPair* b) {
                     const auto ka = std::tie(a->source, a->target, a->kind);
                     const auto kb = std::tie(b->source, b->target, b->kind);
                     return ka < kb;
                   });
  return order;
}

}  // namespace detail

/// Pooled log-weighted similarity:
///   S = sum_i s_i * log(1 + src_i) / sum_i log(1 + src_i)
/// over all pairs, essential and contextual alike. Natural log; the
/// ratio makes the result invariant to the log base. Summation order is
/// fixed by canonical pair id, so S is independent of input order.
inline double aggregate_similarity(std::span<const MatchedPair> pairs) {
  if (pairs.empty()) {
    throw UndefinedMetricError(
        "similarity aggregate over an empty pair list is undefined");
  }
  std::vector<WeightedValue> entries;
  entries.reserve(pairs.size());
  for (const MatchedPair* p : detail::canonical_pair_order(pairs)) {
    if (!(p->similarity >= 0.0 && p->similarity <= 1.0)) {
      throw DomainError("pair similarity for " + p->source.str() +
                        " is outside [0, 1]");
    }
    if (!(p->sources >= 0.0) || !std::isfinite(p->sources)) {
      throw DomainError("pair source count for " + p->source.str() +
                        " must be finite and nonnegative");
    }
    entries.push_back({p->similarity, std::log1p(p->sources)});
  }
  try {
    return weighted_mean(entries);
  } catch (const UndefinedMetricError&) {
    throw UndefinedMetricError(
        "every pair has a zero source count; similarity aggregate is "
        "undefined");
  }
}

/// Relative improvement (S_fc - S_f) / S_f of the combined similarity
/// over the essential-only baseline; a fraction, not a percentage.
inline double improvement(double s_essential, double s_combined) {
  if (!std::isfinite(s_essential) || !std::isfinite(s_combined) ||
      s_essential < 0.0 || s_combined < 0.0) {
    throw DomainError("improvement requires finite nonnegative similarities");
  }
  if (s_essential == 0.0) {
    throw UndefinedImprovementError(
        "baseline similarity is zero; relative improvement is undefined");
  }
  return (s_combined - s_essential) / s_essential;
}

}  // namespace ctxalign
