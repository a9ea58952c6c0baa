#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>
#include <string>

#include "ctxalign/io.hpp"
#include "helpers.hpp"

using namespace ctxalign;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const std::string kDataDir = CTXALIGN_DATA_DIR;

std::string table1_bytes() {
  return io::read_file(kDataDir + "/responsibility_table1.csv");
}

}  // namespace

TEST_CASE("csv core: quoting round trip") {
  const std::vector<std::vector<std::string>> records = {
      {"a", "b,c", "d\"e", "line\nbreak", ""},
      {"plain", "", "x", "y", "z"},
  };
  const auto parsed = csv::parse(csv::write(records));
  CHECK(parsed == records);

  CHECK_THROWS_MATCHES(csv::parse("a,\"unterminated\n"), ParseError,
                       Catch::Matchers::MessageMatches(
                           ContainsSubstring("unterminated")));
  CHECK_THROWS_AS(csv::parse("a,b\"c\n"), ParseError);
  CHECK_THROWS_AS(csv::parse("\"a\"x,b\n"), ParseError);
  // \r\n records accepted alongside \n
  CHECK(csv::parse("a,b\r\nc,d\n") ==
        std::vector<std::vector<std::string>>{{"a", "b"}, {"c", "d"}});
}

TEST_CASE("descriptor table csv: bundled fixture") {
  const Ontology onto = io::parse_descriptor_table(
      table1_bytes(), io::TableFormat::Csv, "responsibility");
  REQUIRE(onto.entities.size() == 1);
  CHECK(onto.entities[0].name == "Responsibility");
  CHECK(onto.property_count() == 10);
  CHECK(onto.descriptor_count() == 36);

  const DescriptorPartition part = partition_descriptors(onto.entities[0]);
  CHECK(part.essential.size() == 18);
  CHECK(part.contextual.size() == 18);
}

TEST_CASE("descriptor table csv: headers and row errors") {
  SECTION("header-only file is an empty ontology") {
    const Ontology onto = io::parse_descriptor_table(
        "concept,property,descriptor,type,sources\n", io::TableFormat::Csv);
    CHECK(onto.entities.empty());
  }
  SECTION("empty file misses its header") {
    CHECK_THROWS_MATCHES(
        io::parse_descriptor_table("", io::TableFormat::Csv), ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("header")));
  }
  SECTION("wrong header") {
    CHECK_THROWS_AS(io::parse_descriptor_table("a,b,c,d,e\nx,y,z,Formal,1\n",
                                               io::TableFormat::Csv),
                    ParseError);
  }
  SECTION("unknown type names the row") {
    const std::string bytes =
        "concept,property,descriptor,type,sources\n"
        "C,P,D,Formal,1\n"
        "C,P,D2,Structural,2\n";
    CHECK_THROWS_MATCHES(
        io::parse_descriptor_table(bytes, io::TableFormat::Csv), ParseError,
        Catch::Matchers::MessageMatches(
            ContainsSubstring("row 3") &&
            ContainsSubstring("Structural")));
  }
  SECTION("bad sources values") {
    for (const std::string bad : {"-3", "abc", "1.5", "", "0x10"}) {
      const std::string bytes =
          "concept,property,descriptor,type,sources\nC,P,D,Formal," +
          csv::escape_field(bad) + "\n";
      CHECK_THROWS_MATCHES(
          io::parse_descriptor_table(bytes, io::TableFormat::Csv), ParseError,
          Catch::Matchers::MessageMatches(ContainsSubstring("field 5")));
    }
  }
  SECTION("field count mismatch") {
    CHECK_THROWS_MATCHES(
        io::parse_descriptor_table(
            "concept,property,descriptor,type,sources\nC,P,D,Formal\n",
            io::TableFormat::Csv),
        ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("row 2")));
  }
  SECTION("duplicate rows name both rows") {
    const std::string bytes =
        "concept,property,descriptor,type,sources\n"
        "C,P,Legal Audit,Formal,1\n"
        "C,P, legal   AUDIT ,Contextual,2\n";
    CHECK_THROWS_MATCHES(
        io::parse_descriptor_table(bytes, io::TableFormat::Csv), ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("row 3") &&
                                        ContainsSubstring("row 2")));
  }
  SECTION("conflicting explicit property values") {
    const std::string bytes =
        "concept,property,descriptor,type,sources,value\n"
        "C,P,D1,Formal,1,v1\n"
        "C,P,D2,Formal,1,v2\n";
    CHECK_THROWS_MATCHES(
        io::parse_descriptor_table(bytes, io::TableFormat::Csv), ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("conflicts")));
  }
  SECTION("explicit value column flows through") {
    const std::string bytes =
        "concept,property,descriptor,type,sources,value\n"
        "C,P,D1,Formal,1,Shared\n"
        "C,P,D2,Contextual,2,\n";
    const Ontology onto =
        io::parse_descriptor_table(bytes, io::TableFormat::Csv);
    CHECK(onto.entities[0].properties[0].value == "Shared");
  }
}

TEST_CASE("ontology round trips: parse-write-parse is parse") {
  std::mt19937 rng(2030);
  const Ontology fixture = io::parse_descriptor_table(
      table1_bytes(), io::TableFormat::Csv, "responsibility");

  SECTION("csv") {
    const std::string written = io::write_ontology_csv(fixture);
    const Ontology again = io::parse_descriptor_table(
        written, io::TableFormat::Csv, fixture.name);
    CHECK(testutil::equal_ontology(fixture, again));
    CHECK(io::write_ontology_csv(again) == written);
  }
  SECTION("json") {
    const std::string written = io::write_ontology_json(fixture);
    const Ontology again =
        io::parse_descriptor_table(written, io::TableFormat::Json);
    CHECK(testutil::equal_ontology(fixture, again));
    CHECK(io::write_ontology_json(again) == written);
  }
  SECTION("random ontologies, json") {
    for (int i = 0; i < 50; ++i) {
      const Ontology onto = testutil::random_ontology(rng);
      const Ontology again = io::parse_descriptor_table(
          io::write_ontology_json(onto), io::TableFormat::Json);
      CHECK(testutil::equal_ontology(onto, again));
    }
  }
}

TEST_CASE("ontology json validation errors") {
  CHECK_THROWS_AS(io::parse_descriptor_table("{", io::TableFormat::Json),
                  ParseError);
  CHECK_THROWS_AS(io::parse_descriptor_table("[]", io::TableFormat::Json),
                  ParseError);
  CHECK_THROWS_MATCHES(
      io::parse_descriptor_table(
          R"({"entities":[{"name":"e","properties":[{"name":"p",
              "descriptors":[{"label":"d","kind":"formal","sources":-1}]}]}]})",
          io::TableFormat::Json),
      ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("sources")));
  CHECK_THROWS_MATCHES(
      io::parse_descriptor_table(
          R"({"entities":[{"name":"e","properties":[{"name":"p",
              "descriptors":[{"label":"d","kind":"odd","sources":1}]}]}]})",
          io::TableFormat::Json),
      ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("kind")));
}

TEST_CASE("override files") {
  const std::string good =
      R"([{"left":"a/p/x","right":"b/p/y","s":0.85}])";
  const OverrideTable table = io::parse_overrides(good);
  CHECK(table.size() == 1);
  CHECK(table.lookup(DescriptorId("a/p/x"), DescriptorId("b/p/y")) == 0.85);

  CHECK_THROWS_MATCHES(
      io::parse_overrides(
          R"([{"left":"a","right":"b","s":0.5},{"left":"a","right":"b","s":0.6}])"),
      ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("duplicate")));
  CHECK_THROWS_MATCHES(
      io::parse_overrides(R"([{"left":"a","right":"b","s":-0.1}])"),
      ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("[0, 1]")));
  CHECK_THROWS_AS(io::parse_overrides(R"([{"left":"a","right":"b","s":1.2}])"),
                  ParseError);
  CHECK_THROWS_AS(io::parse_overrides(R"({"left":"a"})"), ParseError);
  CHECK_THROWS_AS(io::parse_overrides("not json"), ParseError);
}

TEST_CASE("dangling override detection") {
  const Ontology onto = io::parse_descriptor_table(
      table1_bytes(), io::TableFormat::Csv, "responsibility");
  OverrideTable table;
  table.add(DescriptorId("responsibility/integrity/internal audit processes"),
            DescriptorId("responsibility/integrity/code of conduct for ai "
                         "developers"),
            0.5);
  CHECK(io::dangling_override_ids(table, onto, onto).empty());
  table.add(DescriptorId("nowhere/p/d"), DescriptorId("responsibility/x/y"),
            0.5);
  CHECK(io::dangling_override_ids(table, onto, onto).size() == 2);
}

TEST_CASE("mapping files") {
  const EntityMapping identity = io::parse_mapping(
      R"([{"source":"privacy","target":"privacy"}])");
  CHECK(identity.size() == 1);
  CHECK(io::parse_mapping("[]").empty());
  CHECK_THROWS_MATCHES(
      io::parse_mapping(
          R"([{"source":"a","target":"x"},{"source":"b","target":"x"}])"),
      ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("repeats")));
}

TEST_CASE("report json round trip is byte identical") {
  const Ontology onto = io::parse_descriptor_table(
      table1_bytes(), io::TableFormat::Csv, "responsibility");
  const AlignmentReport report =
      align_ontologies(onto, onto, default_mapping(onto, onto), Scorer());
  const std::string bytes = io::write_report_json(report);
  const AlignmentReport parsed = io::parse_report_json(bytes);
  CHECK(io::write_report_json(parsed) == bytes);
  CHECK(parsed.metadata.mode == "both");
  CHECK(parsed.rows.size() == 1);
}

TEST_CASE("report parsing validates the improvement invariant") {
  const std::string bad = R"({
    "schema_version": 1,
    "metadata": {"mode": "both"},
    "rows": [{"source": "a", "target": "a",
              "s_essential": 0.5, "s_combined": 0.55,
              "improvement": 0.5}],
    "average_improvement": 0.5,
    "undefined_average_warning": false})";
  CHECK_THROWS_MATCHES(
      io::parse_report_json(bad), ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("inconsistent")));
  CHECK_THROWS_AS(io::parse_report_json("{}"), ParseError);
  CHECK_THROWS_AS(io::parse_report_json(R"({"schema_version":2,"rows":[]})"),
                  ParseError);

  const std::string bad_average = R"({
    "schema_version": 1,
    "metadata": {"mode": "both"},
    "rows": [{"source": "a", "target": "a",
              "s_essential": 0.5, "s_combined": 0.55,
              "improvement": 0.1}],
    "average_improvement": 0.2,
    "undefined_average_warning": false})";
  CHECK_THROWS_MATCHES(
      io::parse_report_json(bad_average), ParseError,
      Catch::Matchers::MessageMatches(ContainsSubstring("mean")));
}

TEST_CASE("report csv output") {
  const Ontology onto = io::parse_descriptor_table(
      table1_bytes(), io::TableFormat::Csv, "responsibility");
  const AlignmentReport self =
      align_ontologies(onto, onto, default_mapping(onto, onto), Scorer());
  const std::string bytes = io::write_report_csv(self);
  CHECK_THAT(bytes, ContainsSubstring(
                        "concept,s_essential,s_combined,improvement_pct\n"));
  CHECK_THAT(bytes, ContainsSubstring("responsibility,1.000000,1.000000,0.00\n"));
  CHECK_THAT(bytes, ContainsSubstring("average,,,0.00\n"));

  const AlignmentReport fig3 = io::parse_report_json(
      io::read_file(kDataDir + "/fig3_report_fixture.json"));
  const std::string fig3_csv = io::write_report_csv(fig3);
  CHECK_THAT(fig3_csv, ContainsSubstring("privacy,"));
  CHECK_THAT(fig3_csv, ContainsSubstring(",7.04\n"));
  CHECK_THAT(fig3_csv, ContainsSubstring("average,,,4.29\n"));
}

TEST_CASE("fig3 fixture reproduces the published improvements") {
  const AlignmentReport fig3 = io::parse_report_json(
      io::read_file(kDataDir + "/fig3_report_fixture.json"));
  REQUIRE(fig3.rows.size() == 9);
  REQUIRE(fig3.average_improvement.has_value());
  CHECK_THAT(*fig3.average_improvement * 100.0, WithinAbs(4.29, 0.01));
}

TEST_CASE("fnv1a64 known vectors") {
  CHECK(io::fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(io::fnv1a64_hex("a") == "af63dc4c8601ec8c");
  CHECK(io::fnv1a64_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("reference results loader") {
  const io::ReferenceResults ref =
      io::load_reference_results(kDataDir + "/reference_results.json");
  REQUIRE(ref.improvements.size() == 9);
  REQUIRE(ref.levels.size() == 8);
  CHECK(ref.improvements[0].name == "Transparency");
  CHECK(ref.improvements[0].pct == 2.56);
  CHECK(ref.improvements[3].name == "Privacy");
  CHECK(ref.improvements[3].pct == 7.04);
  CHECK(ref.levels[0].pct == 90.80);
  CHECK(ref.levels[7].name == "Solidarity");
  CHECK(ref.levels[7].pct == 13.12);
  CHECK(ref.stated_overall_pct == 4.36);
  CHECK_THAT(io::mean_improvement_pct(ref), WithinAbs(4.287778, 1e-6));
  for (const io::ReferenceEntry& e : ref.improvements) CHECK(!e.note.empty());

  SECTION("missing file") {
    CHECK_THROWS_AS(io::load_reference_results(kDataDir + "/nope.json"),
                    IoError);
  }
  SECTION("checksum mismatch") {
    const std::string bytes =
        io::read_file(kDataDir + "/reference_results.json");
    testutil::TempFile data(".json", bytes + " ");
    testutil::TempFile sidecar("never-used");
    io::write_file(data.path.string() + ".fnv64",
                   io::read_file(kDataDir + "/reference_results.json.fnv64"));
    CHECK_THROWS_AS(io::load_reference_results(data.path), ChecksumError);
    std::filesystem::remove(data.path.string() + ".fnv64");
  }
  SECTION("missing sidecar") {
    const std::string bytes =
        io::read_file(kDataDir + "/reference_results.json");
    testutil::TempFile data(".json", bytes);
    CHECK_THROWS_AS(io::load_reference_results(data.path), IoError);
  }
}

TEST_CASE("format_fixed is plain and locale independent") {
  CHECK(io::format_fixed(0.0, 2) == "0.00");
  CHECK(io::format_fixed(4.287777777, 2) == "4.29");
  CHECK(io::format_fixed(-1.005, 2) == "-1.00");
  CHECK(io::format_fixed(1.0, 6) == "1.000000");
}
