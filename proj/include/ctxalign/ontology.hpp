#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ctxalign/errors.hpp"
#include "ctxalign/text.hpp"

namespace ctxalign {

// ---------------------------------------------------------------------------
// Canonical ids
// ---------------------------------------------------------------------------

/// Canonical path id: normalized label components joined by '/'.
/// Entity ids have one component, property ids two, descriptor ids three.
/// The tag keeps the three id families from mixing at compile time.
template <typename Tag>
class TaggedId {
 public:
  TaggedId() = default;
  explicit TaggedId(std::string path) : path_(std::move(path)) {}

  const std::string& str() const { return path_; }
  bool empty() const { return path_.empty(); }

  /// Last path component (the normalized local label).
  std::string_view leaf() const {
    const std::size_t pos = path_.rfind('/');
    return pos == std::string::npos
               ? std::string_view(path_)
               : std::string_view(path_).substr(pos + 1);
  }

  friend auto operator<=>(const TaggedId&, const TaggedId&) = default;

 private:
  std::string path_;
};

struct EntityTag {};
struct PropertyTag {};
struct DescriptorTag {};

using EntityId = TaggedId<EntityTag>;
using PropertyId = TaggedId<PropertyTag>;
using DescriptorId = TaggedId<DescriptorTag>;

/// Escapes '/' and '%' inside a path component so that joined ids stay
/// injective over distinct label triples.
inline std::string escape_id_component(std::string_view normalized) {
  std::string out;
  out.reserve(normalized.size());
  for (char c : normalized) {
    if (c == '%') {
      out += "%25";
    } else if (c == '/') {
      out += "%2F";
    } else {
      out.push_back(c);
    }
  }
  return out;
}

/// Inverse of escape_id_component.
inline std::string unescape_id_component(std::string_view component) {
  std::string out;
  out.reserve(component.size());
  for (std::size_t i = 0; i < component.size(); ++i) {
    if (component[i] == '%' && i + 2 < component.size()) {
      if (component.substr(i + 1, 2) == "2F") {
        out.push_back('/');
        i += 2;
        continue;
      }
      if (component.substr(i + 1, 2) == "25") {
        out.push_back('%');
        i += 2;
        continue;
      }
    }
    out.push_back(component[i]);
  }
  return out;
}

inline EntityId make_entity_id(std::string_view name) {
  return EntityId(escape_id_component(text::normalize_label(name)));
}

inline PropertyId make_property_id(const EntityId& entity,
                                   std::string_view name) {
  return PropertyId(entity.str() + "/" +
                    escape_id_component(text::normalize_label(name)));
}

inline DescriptorId make_descriptor_id(const PropertyId& property,
                                       std::string_view label) {
  return DescriptorId(property.str() + "/" +
                      escape_id_component(text::normalize_label(label)));
}

/// Entity prefix of a property id (first path component).
inline EntityId entity_of(const PropertyId& property) {
  const std::size_t pos = property.str().find('/');
  return EntityId(property.str().substr(0, pos));
}

/// Property prefix of a descriptor id (first two path components).
inline PropertyId property_of(const DescriptorId& descriptor) {
  const std::size_t pos = descriptor.str().rfind('/');
  return PropertyId(pos == std::string::npos ? descriptor.str()
                                             : descriptor.str().substr(0, pos));
}

// ---------------------------------------------------------------------------
// Model types
// ---------------------------------------------------------------------------

enum class DescriptorKind { Essential, Contextual };

inline const char* kind_name(DescriptorKind k) {
  return k == DescriptorKind::Essential ? "essential" : "contextual";
}

/// Maps a type token to a kind. "formal" is accepted as a synonym for
/// "essential" (source tables use both spellings for the same component).
inline std::optional<DescriptorKind> parse_kind(std::string_view token) {
  const std::string t = text::normalize_label(token);
  if (t == "essential" || t == "formal") return DescriptorKind::Essential;
  if (t == "contextual") return DescriptorKind::Contextual;
  return std::nullopt;
}

/// Labeled unit of meaning attached to a property. `source_count` is the
/// number of corpus sources backing the descriptor and drives its weight
/// during similarity aggregation.
struct Descriptor {
  DescriptorId id;
  std::string label;
  DescriptorKind kind = DescriptorKind::Essential;
  std::uint64_t source_count = 0;
};

/// Sub-aspect of an entity. `value` is the canonical form of the name
/// unless the source data overrides it. Descriptors are kept sorted by id.
struct Property {
  PropertyId id;
  std::string name;
  std::string value;
  std::vector<Descriptor> descriptors;

  const Descriptor* find_descriptor(const DescriptorId& id_) const {
    for (const Descriptor& d : descriptors)
      if (d.id == id_) return &d;
    return nullptr;
  }
};

/// Top-level concept (e.g. Responsibility). Properties are kept sorted
/// by id. Entities are immutable once built.
struct Entity {
  EntityId id;
  std::string name;
  std::vector<Property> properties;

  const Property* find_property(const PropertyId& id_) const {
    for (const Property& p : properties)
      if (p.id == id_) return &p;
    return nullptr;
  }

  std::size_t descriptor_count() const {
    std::size_t n = 0;
    for (const Property& p : properties) n += p.descriptors.size();
    return n;
  }
};

/// Named collection of entities; the in-memory information scope.
struct Ontology {
  std::string name;
  std::vector<Entity> entities;  // sorted by id

  const Entity* find_entity(const EntityId& id_) const {
    const auto it = std::lower_bound(
        entities.begin(), entities.end(), id_,
        [](const Entity& e, const EntityId& key) { return e.id < key; });
    return it != entities.end() && it->id == id_ ? &*it : nullptr;
  }

  const Property* find_property(const PropertyId& id_) const {
    const Entity* e = find_entity(entity_of(id_));
    return e ? e->find_property(id_) : nullptr;
  }

  std::size_t property_count() const {
    std::size_t n = 0;
    for (const Entity& e : entities) n += e.properties.size();
    return n;
  }

  std::size_t descriptor_count() const {
    std::size_t n = 0;
    for (const Entity& e : entities) n += e.descriptor_count();
    return n;
  }
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

struct RawDescriptor {
  std::string label;
  DescriptorKind kind = DescriptorKind::Essential;
  std::uint64_t source_count = 0;
};

struct RawProperty {
  std::string name;
  std::optional<std::string> value;  // defaults to the normalized name
  std::vector<RawDescriptor> descriptors;
};

struct RawEntity {
  std::string name;
  std::vector<RawProperty> properties;
};

/// One flat ingestion row (one descriptor with its ancestry), as produced
/// by the tabular file formats.
struct DescriptorRecord {
  std::string entity;
  std::string property;
  std::string descriptor;
  DescriptorKind kind = DescriptorKind::Essential;
  std::uint64_t source_count = 0;
  std::optional<std::string> property_value;
};

namespace detail {

inline void require_nonempty(std::string_view normalized, std::string_view what,
                             std::string_view raw) {
  if (normalized.empty()) {
    throw ValidationError(std::string(what) + " label is empty" +
                          (raw.empty() ? "" : " after normalization: \"" +
                                                  std::string(raw) + "\""));
  }
}

}  // namespace detail

/// Builds a validated, canonically ordered ontology from raw records.
/// Throws ValidationError on empty labels, duplicate ids after
/// normalization, or an empty property value.
inline Ontology build_ontology(std::string name,
                               const std::vector<RawEntity>& raw_entities) {
  Ontology onto;
  onto.name = std::move(name);
  onto.entities.reserve(raw_entities.size());

  for (const RawEntity& re : raw_entities) {
    Entity entity;
    entity.name = re.name;
    entity.id = make_entity_id(re.name);
    detail::require_nonempty(entity.id.str(), "entity", re.name);

    for (const RawProperty& rp : re.properties) {
      Property prop;
      prop.name = rp.name;
      prop.id = make_property_id(entity.id, rp.name);
      detail::require_nonempty(prop.id.leaf(), "property", rp.name);
      prop.value = rp.value ? *rp.value : text::normalize_label(rp.name);
      if (text::normalize_label(prop.value).empty()) {
        throw ValidationError("property \"" + prop.name +
                              "\" has an empty value");
      }

      for (const RawDescriptor& rd : rp.descriptors) {
        Descriptor dsc;
        dsc.label = rd.label;
        dsc.kind = rd.kind;
        dsc.source_count = rd.source_count;
        dsc.id = make_descriptor_id(prop.id, rd.label);
        detail::require_nonempty(dsc.id.leaf(), "descriptor", rd.label);
        prop.descriptors.push_back(std::move(dsc));
      }

      std::sort(prop.descriptors.begin(), prop.descriptors.end(),
                [](const Descriptor& a, const Descriptor& b) { return a.id < b.id; });
      for (std::size_t i = 1; i < prop.descriptors.size(); ++i) {
        if (prop.descriptors[i].id == prop.descriptors[i - 1].id) {
          throw ValidationError("duplicate descriptor id \"" +
                                prop.descriptors[i].id.str() +
                                "\" after normalization");
        }
      }
      entity.properties.push_back(std::move(prop));
    }

    std::sort(entity.properties.begin(), entity.properties.end(),
              [](const Property& a, const Property& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < entity.properties.size(); ++i) {
      if (entity.properties[i].id == entity.properties[i - 1].id) {
        throw ValidationError("duplicate property id \"" +
                              entity.properties[i].id.str() +
                              "\" after normalization");
      }
    }
    onto.entities.push_back(std::move(entity));
  }

  std::sort(onto.entities.begin(), onto.entities.end(),
            [](const Entity& a, const Entity& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < onto.entities.size(); ++i) {
    if (onto.entities[i].id == onto.entities[i - 1].id) {
      throw ValidationError("duplicate entity id \"" +
                            onto.entities[i].id.str() +
                            "\" after normalization");
    }
  }
  return onto;
}

/// Folds flat ingestion rows into entities/properties and builds the
/// ontology. Rows may arrive in any order; groups form on first sight.
/// Conflicting explicit property values are rejected.
inline Ontology ontology_from_records(
    std::string name, const std::vector<DescriptorRecord>& records) {
  std::vector<RawEntity> raw;
  std::map<std::string, std::size_t> entity_index;
  std::map<std::string, std::pair<std::size_t, std::size_t>> property_index;

  for (const DescriptorRecord& rec : records) {
    const EntityId eid = make_entity_id(rec.entity);
    detail::require_nonempty(eid.str(), "entity", rec.entity);
    auto [eit, enew] = entity_index.try_emplace(eid.str(), raw.size());
    if (enew) raw.push_back(RawEntity{rec.entity, {}});
    RawEntity& re = raw[eit->second];

    const PropertyId pid = make_property_id(eid, rec.property);
    detail::require_nonempty(pid.leaf(), "property", rec.property);
    auto [pit, pnew] =
        property_index.try_emplace(pid.str(), eit->second, re.properties.size());
    if (pnew) re.properties.push_back(RawProperty{rec.property, {}, {}});
    RawProperty& rp = raw[pit->second.first].properties[pit->second.second];

    if (rec.property_value) {
      if (rp.value && *rp.value != *rec.property_value) {
        throw ValidationError("conflicting values for property \"" +
                              rec.property + "\": \"" + *rp.value +
                              "\" vs \"" + *rec.property_value + "\"");
      }
      rp.value = rec.property_value;
    }
    rp.descriptors.push_back(
        RawDescriptor{rec.descriptor, rec.kind, rec.source_count});
  }
  return build_ontology(std::move(name), raw);
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// All descriptors under all properties of the entity, sorted by id.
inline std::vector<Descriptor> all_descriptors(const Entity& entity) {
  std::vector<Descriptor> out;
  out.reserve(entity.descriptor_count());
  for (const Property& p : entity.properties)
    out.insert(out.end(), p.descriptors.begin(), p.descriptors.end());
  std::sort(out.begin(), out.end(),
            [](const Descriptor& a, const Descriptor& b) { return a.id < b.id; });
  return out;
}

struct DescriptorPartition {
  std::vector<Descriptor> essential;
  std::vector<Descriptor> contextual;
};

/// Splits the entity's descriptors by kind. The two sides are disjoint,
/// jointly exhaustive and each sorted by canonical id.
inline DescriptorPartition partition_descriptors(const Entity& entity) {
  DescriptorPartition part;
  for (Descriptor& d : all_descriptors(entity)) {
    (d.kind == DescriptorKind::Essential ? part.essential : part.contextual)
        .push_back(std::move(d));
  }
  return part;
}

}  // namespace ctxalign
