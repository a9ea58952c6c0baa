#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "ctxalign/io.hpp"
#include "helpers.hpp"

using namespace ctxalign;
using Catch::Matchers::ContainsSubstring;
using testutil::run_cli;

namespace {

const std::string kDataDir = CTXALIGN_DATA_DIR;
const std::string kTable1 = kDataDir + "/responsibility_table1.csv";

// a concept whose descriptors are all contextual: S_f is undefined
constexpr const char* kNoEssentialCsv =
    "concept,property,descriptor,type,sources\n"
    "Trust,Perception,Public confidence in AI,Contextual,40\n"
    "Trust,Perception,Media narratives,Contextual,30\n";

}  // namespace

TEST_CASE("cli validate") {
  const auto ok = run_cli("validate " + kTable1);
  CHECK(ok.exit_code == 0);
  CHECK(ok.out == "1 entity, 10 properties, 18 essential, 18 contextual\n");

  const auto missing = run_cli("validate /nonexistent/file.csv");
  CHECK(missing.exit_code == 2);
  CHECK_THAT(missing.err, ContainsSubstring("cannot read"));

  testutil::TempFile bad(".csv",
                         "concept,property,descriptor,type,sources\n"
                         "C,P,D,Structural,1\n");
  const auto invalid = run_cli("validate " + bad.str());
  CHECK(invalid.exit_code == 1);
  CHECK_THAT(invalid.err, ContainsSubstring("row 2"));
}

TEST_CASE("cli validate --lint is advisory only") {
  testutil::TempFile miscued(".csv",
                             "concept,property,descriptor,type,sources\n"
                             "C,P,Public opinion pressure,Formal,5\n");
  const auto res = run_cli("validate " + miscued.str() + " --lint");
  CHECK(res.exit_code == 0);
  CHECK_THAT(res.err, ContainsSubstring("lint:"));
}

TEST_CASE("cli align self alignment and determinism") {
  testutil::TempFile out1(".json");
  const std::string base = "align --source " + kTable1 + " --target " +
                           kTable1 + " --mode both --out ";

  // identical argv twice: byte-identical stdout and output file
  const auto r1 = run_cli(base + out1.str());
  REQUIRE(r1.exit_code == 0);
  CHECK_THAT(r1.out, ContainsSubstring("average improvement 0.00%"));
  const std::string b1 = io::read_file(out1.path);
  const auto r2 = run_cli(base + out1.str());
  REQUIRE(r2.exit_code == 0);

  CHECK(b1 == io::read_file(out1.path));
  CHECK(r1.out == r2.out);

  const AlignmentReport report = io::parse_report_json(b1);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].improvement == 0.0);

  // --serial must produce the identical report
  testutil::TempFile out3(".json");
  const auto r3 = run_cli(base + out3.str() + " --serial");
  REQUIRE(r3.exit_code == 0);
  CHECK(io::read_file(out3.path) == b1);
}

TEST_CASE("cli align csv output and modes") {
  testutil::TempFile out(".csv");
  const auto res = run_cli("align --source " + kTable1 + " --target " +
                           kTable1 + " --format csv --out " + out.str());
  REQUIRE(res.exit_code == 0);
  const std::string bytes = io::read_file(out.path);
  CHECK_THAT(bytes,
             ContainsSubstring("responsibility,1.000000,1.000000,0.00\n"));

  testutil::TempFile out_ess(".json");
  const auto ess = run_cli("align --source " + kTable1 + " --target " +
                           kTable1 + " --mode essential --out " +
                           out_ess.str());
  REQUIRE(ess.exit_code == 0);
  const AlignmentReport report =
      io::parse_report_json(io::read_file(out_ess.path));
  CHECK(report.metadata.mode == "essential");
  CHECK(report.rows[0].s_essential == 1.0);
  CHECK(!report.rows[0].s_combined.has_value());
  CHECK(!report.rows[0].improvement.has_value());
}

TEST_CASE("cli align undefined metrics: warning by default, exit 3 strict") {
  testutil::TempFile src(".csv", kNoEssentialCsv);
  testutil::TempFile tgt(".csv", kNoEssentialCsv);
  testutil::TempFile out(".json");
  const std::string base = "align --source " + src.str() + " --target " +
                           tgt.str() + " --out " + out.str();

  const auto lax = run_cli(base);
  CHECK(lax.exit_code == 0);
  CHECK_THAT(lax.err, ContainsSubstring("undefined"));

  const auto strict = run_cli(base + " --strict");
  CHECK(strict.exit_code == 3);
}

TEST_CASE("cli align with overrides and mapping") {
  testutil::TempFile overrides(
      ".json",
      R"([{"left":"responsibility/integrity/internal audit processes",
           "right":"responsibility/integrity/internal audit processes",
           "s":1.0}])");
  testutil::TempFile mapping(
      ".json", R"([{"source":"responsibility","target":"responsibility"}])");
  testutil::TempFile out(".json");
  const auto res = run_cli("align --source " + kTable1 + " --target " +
                           kTable1 + " --mapping " + mapping.str() +
                           " --overrides " + overrides.str() + " --out " +
                           out.str());
  REQUIRE(res.exit_code == 0);
  const AlignmentReport report =
      io::parse_report_json(io::read_file(out.path));
  CHECK(report.metadata.similarity_source == "overrides+lexical");

  // dangling override ids warn by default and fail under --strict
  testutil::TempFile dangling(
      ".json", R"([{"left":"ghost/p/d","right":"ghost/p/e","s":0.5}])");
  const std::string cmd = "align --source " + kTable1 + " --target " +
                          kTable1 + " --overrides " + dangling.str() +
                          " --out " + out.str();
  const auto lax = run_cli(cmd);
  CHECK(lax.exit_code == 0);
  CHECK_THAT(lax.err, ContainsSubstring("matches no descriptor"));
  const auto strict = run_cli(cmd + " --strict");
  CHECK(strict.exit_code == 1);
}

TEST_CASE("cli query subcommands") {
  const auto props =
      run_cli("query project-props --in " + kTable1 + " --entity Responsibility");
  CHECK(props.exit_code == 0);
  CHECK(std::count(props.out.begin(), props.out.end(), '\n') == 10);

  const auto ess = run_cli("query project-essential --in " + kTable1 +
                           " --property integrity");
  CHECK(ess.exit_code == 0);
  CHECK(std::count(ess.out.begin(), ess.out.end(), '\n') == 3);
  CHECK_THAT(ess.out, ContainsSubstring("Code of Conduct for AI Developers"));

  const auto ctx = run_cli("query project-contextual --in " + kTable1 +
                           " --property \"risk assessment\"");
  CHECK(ctx.exit_code == 0);
  CHECK(std::count(ctx.out.begin(), ctx.out.end(), '\n') == 2);

  const auto join = run_cli("query join --in " + kTable1);
  CHECK(join.exit_code == 0);
  CHECK(std::count(join.out.begin(), join.out.end(), '\n') == 36);

  const auto combined = run_cli("query join --in " + kTable1 +
                                " --property \"educational responsibility\"");
  CHECK(combined.exit_code == 0);
  CHECK(std::count(combined.out.begin(), combined.out.end(), '\n') == 2);

  // single entity: no cross-entity matches possible
  const auto selects = run_cli("query select-entities --in " + kTable1);
  CHECK(selects.exit_code == 0);
  CHECK(selects.out.empty());

  testutil::TempFile two(".csv",
                         "concept,property,descriptor,type,sources,value\n"
                         "A,P1,D1,Formal,1,shared\n"
                         "B,P2,D2,Formal,2,Shared\n");
  const auto pair = run_cli("query select-entities --in " + two.str());
  CHECK(pair.exit_code == 0);
  CHECK(pair.out == "a\tb\n");

  const auto self_diff = run_cli("query diff --in " + kTable1 + " --with " +
                                 kTable1 + " --rel essential");
  CHECK(self_diff.exit_code == 0);
  CHECK(self_diff.out.empty());

  const auto entity_diff = run_cli("query diff --in " + two.str() +
                                   " --entity A --entity B --rel props");
  CHECK(entity_diff.exit_code == 0);
  CHECK(entity_diff.out == "p1\tshared\n");

  const auto ambiguous = run_cli("query project-essential --in " + two.str() +
                                 " --property nope");
  CHECK(ambiguous.exit_code == 1);
}

TEST_CASE("cli report and --compare-paper") {
  const std::string fixture = kDataDir + "/fig3_report_fixture.json";
  const auto plain = run_cli("report --in " + fixture);
  CHECK(plain.exit_code == 0);
  CHECK_THAT(plain.out, ContainsSubstring("+4.29%"));
  CHECK_THAT(plain.out, ContainsSubstring("privacy"));

  const auto compare = run_cli("report --in " + fixture +
                               " --compare-paper --reference " + kDataDir +
                               "/reference_results.json");
  CHECK(compare.exit_code == 0);
  CHECK_THAT(compare.out, ContainsSubstring("4.29"));
  CHECK_THAT(compare.out, ContainsSubstring("4.36"));
  CHECK_THAT(compare.out, ContainsSubstring("not exactly recoverable"));

  // identical invocations produce byte-identical stdout
  const auto again = run_cli("report --in " + fixture +
                             " --compare-paper --reference " + kDataDir +
                             "/reference_results.json");
  CHECK(again.out == compare.out);
}

TEST_CASE("cli usage errors and help") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("align --help").exit_code == 0);
  CHECK(run_cli("bogus-subcommand").exit_code == 4);
  CHECK(run_cli("align --source x").exit_code == 4);  // missing required
  CHECK(run_cli("").exit_code == 4);                  // subcommand required

  const auto help = run_cli("align --help");
  CHECK_THAT(help.out, ContainsSubstring("--weight-basis"));
  CHECK_THAT(help.out, ContainsSubstring("--mode"));
}
