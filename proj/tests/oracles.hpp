// Independent reference implementations used as test oracles. Everything
// here is deliberately naive (nested loops, explicit dedup) and stays
// separate from the code paths under test.
#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctxalign/ontology.hpp"
#include "ctxalign/relations.hpp"
#include "ctxalign/similarity.hpp"
#include "ctxalign/text.hpp"

namespace oracle {

using namespace ctxalign;

// ---------------------------------------------------------------------------
// Relational algebra by brute force over plain tuple vectors
// ---------------------------------------------------------------------------

inline bool same_property_tuple(const PropertyTriple& a,
                                const PropertyTriple& b) {
  return a.entity == b.entity && a.property == b.property &&
         text::normalize_label(a.value) == text::normalize_label(b.value);
}

inline bool same_descriptor_tuple(const DescriptorTriple& a,
                                  const DescriptorTriple& b) {
  return a.property == b.property && a.descriptor == b.descriptor &&
         a.kind == b.kind &&
         text::normalize_label(a.value) == text::normalize_label(b.value);
}

template <typename T, typename Same>
std::vector<T> dedup(const std::vector<T>& in, Same same) {
  std::vector<T> out;
  for (const T& t : in) {
    bool seen = false;
    for (const T& u : out) {
      if (same(t, u)) {
        seen = true;
        break;
      }
    }
    if (!seen) out.push_back(t);
  }
  return out;
}

template <typename T, typename Same>
std::vector<T> difference(const std::vector<T>& a, const std::vector<T>& b,
                          Same same) {
  std::vector<T> out;
  for (const T& t : dedup(a, same)) {
    bool in_b = false;
    for (const T& u : b) {
      if (same(t, u)) {
        in_b = true;
        break;
      }
    }
    if (!in_b) out.push_back(t);
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> project_values(
    const std::vector<PropertyTriple>& tuples, const EntityId& entity) {
  std::set<std::pair<std::string, std::string>> out;
  for (const PropertyTriple& t : tuples) {
    if (t.entity == entity)
      out.emplace(t.property.str(), text::normalize_label(t.value));
  }
  return out;
}

inline std::set<std::pair<std::string, std::string>> project_descriptor_values(
    const std::vector<DescriptorTriple>& tuples, const PropertyId& property) {
  std::set<std::pair<std::string, std::string>> out;
  for (const DescriptorTriple& t : tuples) {
    if (t.property == property)
      out.emplace(t.descriptor.str(), text::normalize_label(t.value));
  }
  return out;
}

/// Equality selection: all unordered id pairs with an equal
/// normalized value, by quadratic enumeration over tuple pairs.
template <typename Tuple, typename IdOf>
std::set<std::pair<std::string, std::string>> matching_pairs(
    const std::vector<Tuple>& tuples, IdOf id_of) {
  std::set<std::pair<std::string, std::string>> out;
  for (const Tuple& a : tuples) {
    for (const Tuple& b : tuples) {
      if (id_of(a) == id_of(b)) continue;
      if (text::normalize_label(a.value) != text::normalize_label(b.value))
        continue;
      std::string x = id_of(a), y = id_of(b);
      if (y < x) std::swap(x, y);
      out.emplace(std::move(x), std::move(y));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Lexical similarity re-implemented from its documented formula
// ---------------------------------------------------------------------------

inline double lexical_reference(const std::string& raw_a,
                                const std::string& raw_b) {
  const std::string a = text::normalize_label(raw_a);
  const std::string b = text::normalize_label(raw_b);
  if (a == b) return 1.0;
  if (a.empty() || b.empty()) return 0.0;

  std::set<std::string> ta, tb;
  {
    std::string token;
    for (const char c : a + " ") {
      if (c == ' ') {
        if (!token.empty()) ta.insert(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
    for (const char c : b + " ") {
      if (c == ' ') {
        if (!token.empty()) tb.insert(token);
        token.clear();
      } else {
        token.push_back(c);
      }
    }
  }
  std::size_t inter = 0;
  for (const std::string& t : ta) inter += tb.count(t);
  const double jaccard =
      static_cast<double>(inter) /
      static_cast<double>(ta.size() + tb.size() - inter);

  const std::vector<char32_t> ua = text::decode_utf8(a);
  const std::vector<char32_t> ub = text::decode_utf8(b);
  std::vector<std::vector<std::size_t>> d(ua.size() + 1,
                                          std::vector<std::size_t>(ub.size() + 1));
  for (std::size_t i = 0; i <= ua.size(); ++i) d[i][0] = i;
  for (std::size_t j = 0; j <= ub.size(); ++j) d[0][j] = j;
  for (std::size_t i = 1; i <= ua.size(); ++i) {
    for (std::size_t j = 1; j <= ub.size(); ++j) {
      const std::size_t cost = ua[i - 1] == ub[j - 1] ? 0 : 1;
      d[i][j] = std::min({d[i - 1][j] + 1, d[i][j - 1] + 1,
                          d[i - 1][j - 1] + cost});
    }
  }
  const double edit = 1.0 - static_cast<double>(d[ua.size()][ub.size()]) /
                                static_cast<double>(std::max(ua.size(), ub.size()));
  return std::clamp(0.5 * jaccard + 0.5 * edit, 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Greedy matching trace
// ---------------------------------------------------------------------------

struct TraceMatch {
  std::string source;
  std::optional<std::string> target;
  double score = 0.0;
};

/// Simulates the documented greedy procedure over an explicit score
/// matrix: sources in ascending id order, each taking the best unmatched
/// target, ties to the smallest target id.
inline std::vector<TraceMatch> greedy_trace(
    std::vector<std::string> source_ids, std::vector<std::string> target_ids,
    const std::vector<std::vector<double>>& score) {
  std::vector<std::size_t> src_order(source_ids.size());
  for (std::size_t i = 0; i < src_order.size(); ++i) src_order[i] = i;
  std::sort(src_order.begin(), src_order.end(),
            [&](std::size_t a, std::size_t b) {
              return source_ids[a] < source_ids[b];
            });

  std::vector<bool> taken(target_ids.size(), false);
  std::vector<TraceMatch> out;
  for (const std::size_t i : src_order) {
    std::optional<std::size_t> best;
    for (std::size_t j = 0; j < target_ids.size(); ++j) {
      if (taken[j]) continue;
      if (!best || score[i][j] > score[i][*best] ||
          (score[i][j] == score[i][*best] &&
           target_ids[j] < target_ids[*best])) {
        best = j;
      }
    }
    TraceMatch m;
    m.source = source_ids[i];
    if (best) {
      taken[*best] = true;
      m.target = target_ids[*best];
      m.score = score[i][*best];
    }
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace oracle
