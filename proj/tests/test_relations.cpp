#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <set>
#include <string>
#include <vector>

#include "ctxalign/io.hpp"
#include "ctxalign/relations.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace ctxalign;

namespace {

Ontology table1() {
  static const Ontology onto = io::parse_descriptor_table(
      io::read_file(std::string(CTXALIGN_DATA_DIR) +
                    "/responsibility_table1.csv"),
      io::TableFormat::Csv, "responsibility");
  return onto;
}

// Random tuple vectors drawn from small pools so values collide often.
std::vector<PropertyTriple> random_property_tuples(std::mt19937& rng,
                                                   int max_tuples) {
  std::uniform_int_distribution<int> count(0, max_tuples);
  std::uniform_int_distribution<int> pick(0, 3);
  std::vector<PropertyTriple> out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    PropertyTriple t;
    t.entity = EntityId("e" + std::to_string(pick(rng)));
    t.property = PropertyId(t.entity.str() + "/p" + std::to_string(pick(rng)));
    t.value = "v" + std::to_string(pick(rng));
    if (pick(rng) == 0) t.value = " V" + std::to_string(pick(rng)) + " ";
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<DescriptorTriple> random_descriptor_tuples(std::mt19937& rng,
                                                       int max_tuples,
                                                       DescriptorKind kind) {
  std::uniform_int_distribution<int> count(0, max_tuples);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<std::uint64_t> sources(0, 9);
  std::vector<DescriptorTriple> out;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    DescriptorTriple t;
    t.property = PropertyId("e/p" + std::to_string(pick(rng)));
    t.descriptor =
        DescriptorId(t.property.str() + "/d" + std::to_string(pick(rng)));
    t.value = "v" + std::to_string(pick(rng));
    t.kind = kind;
    t.source_count = sources(rng);
    out.push_back(std::move(t));
  }
  return out;
}

template <typename Id>
std::set<std::pair<std::string, std::string>> as_string_pairs(
    const std::vector<std::pair<Id, Id>>& pairs) {
  std::set<std::pair<std::string, std::string>> out;
  for (const auto& [a, b] : pairs) out.emplace(a.str(), b.str());
  return out;
}

}  // namespace

TEST_CASE("relation builders on the bundled concept table") {
  const Ontology onto = table1();
  CHECK(property_triples(onto).size() == 10);
  CHECK(essential_triples(onto).size() == 18);
  CHECK(contextual_triples(onto).size() == 18);

  const PropertyId risk(
      make_property_id(EntityId("responsibility"), "Risk Assessment"));
  const auto ess = project_essential_values(essential_triples(onto), risk);
  REQUIRE(ess.size() == 1);
  CHECK(ess[0].second == "AI risk management audits");
  const Property* risk_prop = onto.find_property(risk);
  REQUIRE(risk_prop != nullptr);
  CHECK(risk_prop->find_descriptor(ess[0].first)->source_count == 73);

  const auto ctx = project_contextual_values(contextual_triples(onto), risk);
  REQUIRE(ctx.size() == 2);
  CHECK(ctx[0].second == "Impact of AI risks on public trust");
  CHECK(ctx[1].second == "Risk forecasting for societal impact");
}

TEST_CASE("relation builders: empty and singleton") {
  const Ontology empty = build_ontology("empty", {});
  CHECK(property_triples(empty).empty());
  CHECK(essential_triples(empty).empty());
  CHECK(contextual_triples(empty).empty());

  RawEntity e{"Responsibility", {{"Integrity", std::nullopt, {}}}};
  const Ontology one = build_ontology("one", {e});
  const PropertyRelation rel = property_triples(one);
  REQUIRE(rel.size() == 1);
  CHECK(rel.tuples()[0].entity.str() == "responsibility");
  CHECK(rel.tuples()[0].property.str() == "responsibility/integrity");
  CHECK(rel.tuples()[0].value == "integrity");
  // projecting the singleton relation returns exactly that one pair
  const auto single = project_property_values(rel, EntityId("responsibility"));
  REQUIRE(single.size() == 1);
  CHECK(single[0].first.str() == "responsibility/integrity");
  CHECK(single[0].second == "integrity");

  RawEntity ctx_only{"c",
                     {{"p",
                       std::nullopt,
                       {{"only ctx", DescriptorKind::Contextual, 1}}}}};
  const Ontology onto = build_ontology("t", {ctx_only});
  CHECK(essential_triples(onto).empty());
  CHECK(contextual_triples(onto).size() == 1);
}

TEST_CASE("relation set semantics") {
  PropertyRelation rel;
  rel.insert({EntityId("a"), PropertyId("a/p"), "V"});
  rel.insert({EntityId("a"), PropertyId("a/p"), "  v "});  // same canonical key
  CHECK(rel.size() == 1);
  rel.insert({EntityId("a"), PropertyId("a/p"), "w"});
  CHECK(rel.size() == 2);
}

TEST_CASE("projections: unknown keys and kind guards") {
  const Ontology onto = table1();
  CHECK(project_property_values(property_triples(onto), EntityId("nope"))
            .empty());
  CHECK(project_property_values(property_triples(onto),
                                EntityId("responsibility"))
            .size() == 10);

  const PropertyId integrity(
      make_property_id(EntityId("responsibility"), "integrity"));
  const auto ess = project_essential_values(essential_triples(onto), integrity);
  REQUIRE(ess.size() == 3);
  CHECK(ess[0].second == "Code of Conduct for AI Developers");
  CHECK(ess[1].second == "Ethical Compliance Documentation");
  CHECK(ess[2].second == "Internal Audit Processes");

  const PropertyId awareness(
      make_property_id(EntityId("responsibility"), "awareness"));
  const auto ctx =
      project_contextual_values(contextual_triples(onto), awareness);
  REQUIRE(ctx.size() == 2);
  CHECK(ctx[0].second == "Influence of Social Media on Awareness");
  CHECK(ctx[1].second == "Public Awareness Campaigns");

  CHECK(project_essential_values(essential_triples(onto), PropertyId("x/y"))
            .empty());
  CHECK(project_contextual_values(contextual_triples(onto), PropertyId("x/y"))
            .empty());
  CHECK_THROWS_AS(
      project_essential_values(contextual_triples(onto), integrity),
      KindError);
  CHECK_THROWS_AS(
      project_contextual_values(essential_triples(onto), awareness),
      KindError);
}

TEST_CASE("join_descriptors is a keyed outer union") {
  const Ontology onto = table1();
  const DescriptorRelation ess = essential_triples(onto);
  const DescriptorRelation ctx = contextual_triples(onto);
  CHECK(join_descriptors(ess, ctx).size() == 36);
  CHECK(join_descriptors(ess, DescriptorRelation()) == ess);
  CHECK(join_descriptors(DescriptorRelation(), DescriptorRelation()).empty());
  CHECK_THROWS_AS(join_descriptors(ctx, ctx), KindError);

  // a property with only one kind keeps its tuples
  RawEntity e{"solo",
              {{"p", std::nullopt, {{"d", DescriptorKind::Essential, 1}}}}};
  const Ontology one = build_ontology("t", {e});
  CHECK(join_descriptors(essential_triples(one), contextual_triples(one))
            .size() == 1);
}

TEST_CASE("select_matching_entities: constructed cases") {
  PropertyRelation rel;
  rel.insert({EntityId("a"), PropertyId("a/p1"), "transparency"});
  rel.insert({EntityId("b"), PropertyId("b/p2"), "Transparency"});
  const auto pairs = select_matching_entities(rel);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first.str() == "a");
  CHECK(pairs[0].second.str() == "b");

  PropertyRelation lone;
  lone.insert({EntityId("a"), PropertyId("a/p"), "x"});
  CHECK(select_matching_entities(lone).empty());

  PropertyRelation three;
  three.insert({EntityId("a"), PropertyId("a/p"), "shared"});
  three.insert({EntityId("b"), PropertyId("b/p"), "shared"});
  three.insert({EntityId("c"), PropertyId("c/p"), "shared"});
  CHECK(select_matching_entities(three).size() == 3);
}

TEST_CASE("select_matching_by_kind: constructed cases") {
  DescriptorRelation rel;
  rel.insert({PropertyId("e/p1"), DescriptorId("e/p1/d1"),
              "cultural differences in legal liability",
              DescriptorKind::Contextual, 1});
  rel.insert({PropertyId("e/p2"), DescriptorId("e/p2/d2"),
              "Cultural differences in legal liability",
              DescriptorKind::Contextual, 2});
  const auto pairs = select_matching_by_contextual(rel);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].first.str() == "e/p1");
  CHECK(pairs[0].second.str() == "e/p2");
  CHECK_THROWS_AS(select_matching_by_essential(rel), KindError);

  DescriptorRelation distinct;
  distinct.insert({PropertyId("e/p1"), DescriptorId("e/p1/d1"), "one",
                   DescriptorKind::Essential, 1});
  distinct.insert({PropertyId("e/p2"), DescriptorId("e/p2/d2"), "two",
                   DescriptorKind::Essential, 1});
  CHECK(select_matching_by_essential(distinct).empty());
}

TEST_CASE("combined_description per property") {
  const Ontology onto = table1();
  const EntityId resp("responsibility");
  CHECK(combined_description(onto, make_property_id(resp, "risk assessment"))
            .size() == 3);
  CHECK(combined_description(
            onto, make_property_id(resp, "Educational Responsibility"))
            .size() == 2);
  CHECK_THROWS_AS(combined_description(onto, PropertyId("responsibility/nope")),
                  UnknownIdError);

  RawEntity e{"bare", {{"empty prop", std::nullopt, {}}}};
  const Ontology bare = build_ontology("t", {e});
  CHECK(combined_description(bare, PropertyId("bare/empty prop")).empty());
}

TEST_CASE("relation_difference basics") {
  const Ontology onto = table1();
  const DescriptorRelation ess = essential_triples(onto);
  CHECK(relation_difference(ess, ess).empty());
  CHECK(relation_difference(ess, DescriptorRelation()) == ess);
  CHECK(relation_difference(DescriptorRelation(), ess).empty());
}

TEST_CASE("per-property descriptions union to the full join") {
  const Ontology onto = table1();
  DescriptorRelation unioned;
  for (const Entity& e : onto.entities)
    for (const Property& p : e.properties)
      for (const DescriptorTriple& t : combined_description(onto, p.id))
        unioned.insert(t);
  CHECK(unioned ==
        join_descriptors(essential_triples(onto), contextual_triples(onto)));
}

TEST_CASE("oracle equivalence on random relations") {
  std::mt19937 rng(2024);
  int selection_cases = 0;
  for (int iter = 0; iter < 600; ++iter) {
    const std::vector<PropertyTriple> raw = random_property_tuples(rng, 8);
    const PropertyRelation rel{raw};

    // projection oracle
    for (int e = 0; e < 4; ++e) {
      const EntityId entity("e" + std::to_string(e));
      std::set<std::pair<std::string, std::string>> got;
      for (const auto& [prop, value] : project_property_values(rel, entity))
        got.emplace(prop.str(), text::normalize_label(value));
      CHECK(got == oracle::project_values(raw, entity));
    }

    // selection oracle
    const auto got_pairs = as_string_pairs(select_matching_entities(rel));
    const auto want_pairs = oracle::matching_pairs(
        raw, [](const PropertyTriple& t) { return t.entity.str(); });
    CHECK(got_pairs == want_pairs);
    if (!want_pairs.empty()) ++selection_cases;

    // difference oracle
    const std::vector<PropertyTriple> raw_b = random_property_tuples(rng, 8);
    const PropertyRelation rel_b{raw_b};
    const PropertyRelation diff = relation_difference(rel, rel_b);
    const auto want_diff =
        oracle::difference(raw, raw_b, oracle::same_property_tuple);
    CHECK(diff.size() == want_diff.size());
    for (const PropertyTriple& t : want_diff) CHECK(diff.contains(t));

    // difference algebra: (a - b) u (a n b) = a, (a - b) n b = empty
    CHECK(relation_union(diff, relation_intersection(rel, rel_b)) == rel);
    CHECK(relation_intersection(diff, rel_b).empty());
  }
  CHECK(selection_cases > 50);  // the generator must actually exercise matches
}

TEST_CASE("oracle equivalence for descriptor selections") {
  std::mt19937 rng(77);
  for (int iter = 0; iter < 600; ++iter) {
    const auto kind = iter % 2 == 0 ? DescriptorKind::Essential
                                    : DescriptorKind::Contextual;
    const std::vector<DescriptorTriple> raw =
        random_descriptor_tuples(rng, 8, kind);
    const DescriptorRelation rel{raw};

    const auto got = kind == DescriptorKind::Essential
                         ? as_string_pairs(select_matching_by_essential(rel))
                         : as_string_pairs(select_matching_by_contextual(rel));
    CHECK(got == oracle::matching_pairs(raw, [](const DescriptorTriple& t) {
            return t.property.str();
          }));

    // projection oracle per property
    for (int p = 0; p < 4; ++p) {
      const PropertyId prop("e/p" + std::to_string(p));
      std::set<std::pair<std::string, std::string>> got_proj;
      const auto proj = kind == DescriptorKind::Essential
                            ? project_essential_values(rel, prop)
                            : project_contextual_values(rel, prop);
      for (const auto& [d, v] : proj)
        got_proj.emplace(d.str(), text::normalize_label(v));
      CHECK(got_proj == oracle::project_descriptor_values(raw, prop));
    }

    const std::vector<DescriptorTriple> raw_b =
        random_descriptor_tuples(rng, 8, kind);
    const DescriptorRelation rel_b{raw_b};
    const DescriptorRelation diff = relation_difference(rel, rel_b);
    const auto want =
        oracle::difference(raw, raw_b, oracle::same_descriptor_tuple);
    CHECK(diff.size() == want.size());
    for (const DescriptorTriple& t : want) CHECK(diff.contains(t));
  }
}

TEST_CASE("selections are symmetric irreflexive pair sets") {
  std::mt19937 rng(123);
  for (int iter = 0; iter < 100; ++iter) {
    const PropertyRelation rel{random_property_tuples(rng, 8)};
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& [a, b] : select_matching_entities(rel)) {
      CHECK(a != b);
      CHECK(a < b);  // canonical orientation
      CHECK(seen.emplace(a.str(), b.str()).second);  // no duplicates
    }
  }
}

TEST_CASE("restrict_to_entity") {
  const Ontology onto = table1();
  const PropertyRelation all = property_triples(onto);
  CHECK(restrict_to_entity(all, EntityId("responsibility")) == all);
  CHECK(restrict_to_entity(all, EntityId("other")).empty());
  CHECK(restrict_to_entity(essential_triples(onto), EntityId("responsibility"))
            .size() == 18);
}
