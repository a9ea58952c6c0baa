#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <string>

#include "ctxalign/text.hpp"

using namespace ctxalign;

TEST_CASE("normalize_label: whitespace and case rules") {
  CHECK(text::normalize_label("  Legal   Liability ") == "legal liability");
  CHECK(text::normalize_label("") == "");
  CHECK(text::normalize_label("AI Decision Accountability") ==
        "ai decision accountability");
  CHECK(text::normalize_label("\tRisk\nAssessment\r\n") == "risk assessment");
  CHECK(text::normalize_label("   ") == "");
}

TEST_CASE("normalize_label: unicode composition and folding") {
  // precomposed U+00C9 vs E + combining acute
  CHECK(text::normalize_label("\xC3\x89") == "\xC3\xA9");
  CHECK(text::normalize_label("E\xCC\x81") == "\xC3\xA9");
  CHECK(text::normalize_label("\xC3\x89") == text::normalize_label("E\xCC\x81"));
  // full case folding: sharp s
  CHECK(text::normalize_label("STRASSE") == text::normalize_label("stra\xC3\x9F""e"));
  // no-break space collapses like a plain space
  CHECK(text::normalize_label("a\xC2\xA0\xC2\xA0""b") == "a b");
  // Greek iota with dialytika+tonos folds to a decomposed run and recomposes
  CHECK(text::normalize_label("\xCE\x90") ==
        text::normalize_label("\xCE\xB9\xCC\x88\xCC\x81"));
}

TEST_CASE("normalize_label: malformed UTF-8 never throws") {
  const std::string bad = "abc\xFF\xC3(def";
  CHECK_NOTHROW(text::normalize_label(bad));
  CHECK(text::normalize_label(bad) == text::normalize_label(bad));
}

TEST_CASE("normalize_label is idempotent") {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> len(0, 24);
  std::uniform_int_distribution<int> ch(0, 255);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    const int n = len(rng);
    for (int k = 0; k < n; ++k) s.push_back(static_cast<char>(ch(rng)));
    const std::string once = text::normalize_label(s);
    CHECK(text::normalize_label(once) == once);
  }
}

TEST_CASE("tokens splits on single spaces") {
  CHECK(text::tokens("legal liability") ==
        std::vector<std::string>{"legal", "liability"});
  CHECK(text::tokens("") == std::vector<std::string>{});
  CHECK(text::tokens("one") == std::vector<std::string>{"one"});
}

TEST_CASE("edit_distance basics") {
  CHECK(text::edit_distance("", "") == 0);
  CHECK(text::edit_distance("", "abc") == 3);
  CHECK(text::edit_distance("abc", "abc") == 0);
  CHECK(text::edit_distance("risk assessment", "risk audit") == 8);
  CHECK(text::edit_distance("risk audit", "risk assessment") == 8);
  // counted in code points, not bytes
  CHECK(text::edit_distance("\xC3\xA9", "e") == 1);
}

TEST_CASE("decode_utf8 replaces malformed sequences") {
  const auto cps = text::decode_utf8("a\xFF""b");
  REQUIRE(cps.size() == 3);
  CHECK(cps[1] == text::kReplacementChar);
  // overlong encoding of '/' is rejected
  const auto overlong = text::decode_utf8("\xC0\xAF");
  for (const char32_t cp : overlong) CHECK(cp == text::kReplacementChar);
}
