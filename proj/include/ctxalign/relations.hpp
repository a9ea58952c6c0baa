#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "ctxalign/errors.hpp"
#include "ctxalign/ontology.hpp"
#include "ctxalign/text.hpp"

namespace ctxalign {

// ---------------------------------------------------------------------------
// Tuple types
// ---------------------------------------------------------------------------

/// (entity, property, value) tuple.
struct PropertyTriple {
  EntityId entity;
  PropertyId property;
  std::string value;

  /// Canonical identity: ids plus the normalized value. Tuples equal
  /// under this key are the same set element.
  std::tuple<std::string, std::string, std::string> key() const {
    return {entity.str(), property.str(), text::normalize_label(value)};
  }
};

/// (property, descriptor, value) tuple tagged with the descriptor kind.
/// `source_count` rides along as payload and does not take part in
/// canonical identity.
struct DescriptorTriple {
  PropertyId property;
  DescriptorId descriptor;
  std::string value;
  DescriptorKind kind = DescriptorKind::Essential;
  std::uint64_t source_count = 0;

  std::tuple<std::string, std::string, std::string, int> key() const {
    return {property.str(), descriptor.str(), text::normalize_label(value),
            static_cast<int>(kind)};
  }
};

// ---------------------------------------------------------------------------
// Relation: finite tuple set with canonical iteration order
// ---------------------------------------------------------------------------

/// Duplicate inserts (canonical-key equality) are no-ops; iteration is in
/// canonical key order, so all derived output is deterministic.
template <typename T>
class Relation {
 public:
  Relation() = default;
  explicit Relation(std::vector<T> tuples) {
    for (T& t : tuples) insert(std::move(t));
  }

  void insert(T tuple) {
    const auto k = tuple.key();
    const auto it = std::lower_bound(
        tuples_.begin(), tuples_.end(), k,
        [](const T& a, const decltype(k)& key) { return a.key() < key; });
    if (it != tuples_.end() && it->key() == k) return;
    tuples_.insert(it, std::move(tuple));
  }

  bool contains(const T& tuple) const {
    const auto k = tuple.key();
    const auto it = std::lower_bound(
        tuples_.begin(), tuples_.end(), k,
        [](const T& a, const decltype(k)& key) { return a.key() < key; });
    return it != tuples_.end() && it->key() == k;
  }

  const std::vector<T>& tuples() const { return tuples_; }
  std::size_t size() const { return tuples_.size(); }
  bool empty() const { return tuples_.empty(); }
  auto begin() const { return tuples_.begin(); }
  auto end() const { return tuples_.end(); }

  friend bool operator==(const Relation& a, const Relation& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a.tuples_[i].key() != b.tuples_[i].key()) return false;
    return true;
  }

 private:
  std::vector<T> tuples_;
};

using PropertyRelation = Relation<PropertyTriple>;
using DescriptorRelation = Relation<DescriptorTriple>;

namespace detail {

inline void require_kind(const DescriptorRelation& rel, DescriptorKind kind,
                         const char* where) {
  for (const DescriptorTriple& t : rel) {
    if (t.kind != kind) {
      throw KindError(std::string(where) + ": relation contains a " +
                      kind_name(t.kind) + " tuple (" + t.descriptor.str() +
                      ") where only " + kind_name(kind) + " tuples are valid");
    }
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Relation builders
// ---------------------------------------------------------------------------

/// One tuple per (entity, property) with the property's value.
inline PropertyRelation property_triples(const Ontology& onto) {
  PropertyRelation rel;
  for (const Entity& e : onto.entities)
    for (const Property& p : e.properties)
      rel.insert(PropertyTriple{e.id, p.id, p.value});
  return rel;
}

inline DescriptorRelation descriptor_triples(const Ontology& onto,
                                             DescriptorKind kind) {
  DescriptorRelation rel;
  for (const Entity& e : onto.entities)
    for (const Property& p : e.properties)
      for (const Descriptor& d : p.descriptors)
        if (d.kind == kind)
          rel.insert(DescriptorTriple{p.id, d.id, d.label, d.kind,
                                      d.source_count});
  return rel;
}

inline DescriptorRelation essential_triples(const Ontology& onto) {
  return descriptor_triples(onto, DescriptorKind::Essential);
}

inline DescriptorRelation contextual_triples(const Ontology& onto) {
  return descriptor_triples(onto, DescriptorKind::Contextual);
}

// ---------------------------------------------------------------------------
// Projections
// ---------------------------------------------------------------------------

/// All (property, value) pairs of the given entity.
inline std::vector<std::pair<PropertyId, std::string>> project_property_values(
    const PropertyRelation& rel, const EntityId& entity) {
  std::vector<std::pair<PropertyId, std::string>> out;
  for (const PropertyTriple& t : rel)
    if (t.entity == entity) out.emplace_back(t.property, t.value);
  return out;  // source order is canonical already
}

/// All (descriptor, value) pairs of the given property. The relation must
/// hold only essential tuples.
inline std::vector<std::pair<DescriptorId, std::string>>
project_essential_values(const DescriptorRelation& rel,
                         const PropertyId& property) {
  detail::require_kind(rel, DescriptorKind::Essential,
                       "project_essential_values");
  std::vector<std::pair<DescriptorId, std::string>> out;
  for (const DescriptorTriple& t : rel)
    if (t.property == property) out.emplace_back(t.descriptor, t.value);
  return out;
}

/// Mirror of project_essential_values for contextual relations.
inline std::vector<std::pair<DescriptorId, std::string>>
project_contextual_values(const DescriptorRelation& rel,
                          const PropertyId& property) {
  detail::require_kind(rel, DescriptorKind::Contextual,
                       "project_contextual_values");
  std::vector<std::pair<DescriptorId, std::string>> out;
  for (const DescriptorTriple& t : rel)
    if (t.property == property) out.emplace_back(t.descriptor, t.value);
  return out;
}

// ---------------------------------------------------------------------------
// Join, selections, difference
// ---------------------------------------------------------------------------

/// Keyed outer union by property: every input tuple appears exactly once,
/// and a property present on only one side keeps its tuples. An inner
/// join would silently drop properties lacking one descriptor kind.
inline DescriptorRelation join_descriptors(const DescriptorRelation& essential,
                                           const DescriptorRelation& contextual) {
  detail::require_kind(essential, DescriptorKind::Essential,
                       "join_descriptors");
  detail::require_kind(contextual, DescriptorKind::Contextual,
                       "join_descriptors");
  DescriptorRelation out;
  for (const DescriptorTriple& t : essential) out.insert(t);
  for (const DescriptorTriple& t : contextual) out.insert(t);
  return out;
}

namespace detail {

template <typename Id, typename Tuple, typename IdOf, typename ValueOf>
std::vector<std::pair<Id, Id>> select_matching(const Relation<Tuple>& rel,
                                               IdOf id_of, ValueOf value_of) {
  std::map<std::string, std::set<Id>> by_value;
  for (const Tuple& t : rel)
    by_value[text::normalize_label(value_of(t))].insert(id_of(t));

  std::set<std::pair<Id, Id>> pairs;
  for (const auto& [value, ids] : by_value) {
    for (auto i = ids.begin(); i != ids.end(); ++i) {
      for (auto j = std::next(i); j != ids.end(); ++j) {
        pairs.emplace(*i, *j);  // set iteration gives canonical order
      }
    }
  }
  return {pairs.begin(), pairs.end()};
}

}  // namespace detail

/// Unordered pairs of distinct entities that share at least one equal
/// canonical property value. Each pair appears once, ids in canonical order.
inline std::vector<std::pair<EntityId, EntityId>> select_matching_entities(
    const PropertyRelation& rel) {
  return detail::select_matching<EntityId>(
      rel, [](const PropertyTriple& t) { return t.entity; },
      [](const PropertyTriple& t) -> const std::string& { return t.value; });
}

/// Property pairs sharing at least one equal contextual descriptor value.
inline std::vector<std::pair<PropertyId, PropertyId>>
select_matching_by_contextual(const DescriptorRelation& rel) {
  detail::require_kind(rel, DescriptorKind::Contextual,
                       "select_matching_by_contextual");
  return detail::select_matching<PropertyId>(
      rel, [](const DescriptorTriple& t) { return t.property; },
      [](const DescriptorTriple& t) -> const std::string& { return t.value; });
}

/// Property pairs sharing at least one equal essential descriptor value.
inline std::vector<std::pair<PropertyId, PropertyId>>
select_matching_by_essential(const DescriptorRelation& rel) {
  detail::require_kind(rel, DescriptorKind::Essential,
                       "select_matching_by_essential");
  return detail::select_matching<PropertyId>(
      rel, [](const DescriptorTriple& t) { return t.property; },
      [](const DescriptorTriple& t) -> const std::string& { return t.value; });
}

/// All descriptor tuples of both kinds for one property. Equals the
/// descriptor join restricted to that property.
inline DescriptorRelation combined_description(const Ontology& onto,
                                               const PropertyId& property) {
  const Property* prop = onto.find_property(property);
  if (prop == nullptr) {
    throw UnknownIdError("unknown property id \"" + property.str() + "\"");
  }
  DescriptorRelation rel;
  for (const Descriptor& d : prop->descriptors)
    rel.insert(DescriptorTriple{prop->id, d.id, d.label, d.kind,
                                d.source_count});
  return rel;
}

/// Tuples of `a` absent from `b` under canonical equality.
template <typename T>
Relation<T> relation_difference(const Relation<T>& a, const Relation<T>& b) {
  Relation<T> out;
  for (const T& t : a)
    if (!b.contains(t)) out.insert(t);
  return out;
}

template <typename T>
Relation<T> relation_union(const Relation<T>& a, const Relation<T>& b) {
  Relation<T> out = a;
  for (const T& t : b) out.insert(t);
  return out;
}

template <typename T>
Relation<T> relation_intersection(const Relation<T>& a, const Relation<T>& b) {
  Relation<T> out;
  for (const T& t : a)
    if (b.contains(t)) out.insert(t);
  return out;
}

/// Restriction of a property relation to one entity.
inline PropertyRelation restrict_to_entity(const PropertyRelation& rel,
                                           const EntityId& entity) {
  PropertyRelation out;
  for (const PropertyTriple& t : rel)
    if (t.entity == entity) out.insert(t);
  return out;
}

/// Restriction of a descriptor relation to the properties of one entity.
inline DescriptorRelation restrict_to_entity(const DescriptorRelation& rel,
                                             const EntityId& entity) {
  DescriptorRelation out;
  for (const DescriptorTriple& t : rel)
    if (entity_of(t.property) == entity) out.insert(t);
  return out;
}

}  // namespace ctxalign
