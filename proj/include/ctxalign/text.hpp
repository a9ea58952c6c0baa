#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ctxalign/unicode_tables.hpp"

namespace ctxalign::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// ---------------------------------------------------------------------------
// UTF-8 <-> code points
// ---------------------------------------------------------------------------

/// Decodes UTF-8 bytes into code points. Malformed sequences decode to
/// U+FFFD one byte at a time, so decoding never fails.
inline std::vector<char32_t> decode_utf8(std::string_view bytes) {
  std::vector<char32_t> out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    if (i + len > bytes.size()) {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    // Reject overlong forms, surrogates and out-of-range values.
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (!ok || cp < kMinForLen[len] || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(kReplacementChar);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

inline void encode_utf8(char32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

inline std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) encode_utf8(cp, out);
  return out;
}

// ---------------------------------------------------------------------------
// Normalization primitives
// ---------------------------------------------------------------------------

inline std::uint8_t combining_class(char32_t cp) {
  const auto* begin = std::begin(unicode::kCombiningClasses);
  const auto* end = std::end(unicode::kCombiningClasses);
  const auto* it = std::lower_bound(
      begin, end, cp,
      [](const unicode::CombiningClassEntry& e, char32_t c) { return e.cp < c; });
  return (it != end && it->cp == cp) ? it->ccc : 0;
}

/// Full Unicode case folding of one code point (1..3 code points out).
inline void case_fold(char32_t cp, std::vector<char32_t>& out) {
  const auto* begin = std::begin(unicode::kCaseFolds);
  const auto* end = std::end(unicode::kCaseFolds);
  const auto* it = std::lower_bound(
      begin, end, cp,
      [](const unicode::CaseFoldEntry& e, char32_t c) { return e.cp < c; });
  if (it != end && it->cp == cp) {
    for (char32_t f : it->out) {
      if (f != 0) out.push_back(f);
    }
  } else {
    out.push_back(cp);
  }
}

/// Primary canonical composition of a pair, or 0 when none exists.
/// Hangul LV/LVT composition is algorithmic.
inline char32_t compose_pair(char32_t first, char32_t second) {
  constexpr char32_t kLBase = 0x1100, kVBase = 0x1161, kTBase = 0x11A7;
  constexpr char32_t kSBase = 0xAC00;
  constexpr int kVCount = 21, kTCount = 28;
  if (first >= kLBase && first < kLBase + 19 && second >= kVBase &&
      second < kVBase + kVCount) {
    return kSBase +
           ((first - kLBase) * kVCount + (second - kVBase)) * kTCount;
  }
  if (first >= kSBase && first <= 0xD7A3 && (first - kSBase) % kTCount == 0 &&
      second > kTBase && second < kTBase + kTCount) {
    return first + (second - kTBase);
  }
  const auto* begin = std::begin(unicode::kCompositions);
  const auto* end = std::end(unicode::kCompositions);
  const auto* it = std::lower_bound(
      begin, end, std::pair<char32_t, char32_t>{first, second},
      [](const unicode::CompositionEntry& e,
         const std::pair<char32_t, char32_t>& key) {
        return e.first != key.first ? e.first < key.first
                                    : e.second < key.second;
      });
  if (it != end && it->first == first && it->second == second)
    return it->composed;
  return 0;
}

/// Reorders runs of combining marks into canonical (nondecreasing ccc) order.
inline void canonical_order(std::vector<char32_t>& cps) {
  for (std::size_t i = 1; i < cps.size(); ++i) {
    const std::uint8_t cc = combining_class(cps[i]);
    if (cc == 0) continue;
    std::size_t j = i;
    while (j > 0) {
      const std::uint8_t prev = combining_class(cps[j - 1]);
      if (prev == 0 || prev <= cc) break;
      std::swap(cps[j - 1], cps[j]);
      --j;
    }
  }
}

/// Canonical composition pass (UAX #15 style): combines each unblocked
/// mark or adjacent starter with the last starter where a primary
/// composite exists. Input is expected in canonical mark order.
inline void compose(std::vector<char32_t>& cps) {
  if (cps.empty()) return;
  std::vector<char32_t> out;
  out.reserve(cps.size());
  std::ptrdiff_t last_starter = -1;
  std::uint8_t prev_cc = 0;
  for (char32_t c : cps) {
    const std::uint8_t cc = combining_class(c);
    if (last_starter >= 0) {
      const bool adjacent =
          out.size() == static_cast<std::size_t>(last_starter) + 1;
      const bool blocked = !adjacent && (prev_cc == 0 || prev_cc >= cc);
      if (!blocked) {
        if (const char32_t comp = compose_pair(out[last_starter], c)) {
          out[last_starter] = comp;
          continue;
        }
      }
    }
    out.push_back(c);
    if (cc == 0) {
      last_starter = static_cast<std::ptrdiff_t>(out.size()) - 1;
    }
    prev_cc = cc;
  }
  cps = std::move(out);
}

inline bool is_space(char32_t cp) {
  switch (cp) {
    case 0x09:
    case 0x0A:
    case 0x0B:
    case 0x0C:
    case 0x0D:
    case 0x20:
    case 0x85:
    case 0xA0:
    case 0x1680:
    case 0x2028:
    case 0x2029:
    case 0x202F:
    case 0x205F:
    case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// ---------------------------------------------------------------------------
// Label normalization
// ---------------------------------------------------------------------------

/// Canonical form of a label: trimmed, case-folded, with whitespace runs
/// collapsed to single spaces and combining sequences composed, so that
/// visually identical spellings compare equal.
inline std::string normalize_label(std::string_view raw) {
  std::vector<char32_t> cps = decode_utf8(raw);

  std::vector<char32_t> folded;
  folded.reserve(cps.size());
  for (char32_t cp : cps) case_fold(cp, folded);

  canonical_order(folded);
  compose(folded);

  std::vector<char32_t> collapsed;
  collapsed.reserve(folded.size());
  bool pending_space = false;
  for (char32_t cp : folded) {
    if (is_space(cp)) {
      pending_space = !collapsed.empty();
      continue;
    }
    if (pending_space) {
      collapsed.push_back(U' ');
      pending_space = false;
    }
    collapsed.push_back(cp);
  }
  return encode_utf8(collapsed);
}

// ---------------------------------------------------------------------------
// Lexical measures over normalized text
// ---------------------------------------------------------------------------

/// Splits normalized text on single spaces (the only whitespace left
/// after normalize_label).
inline std::vector<std::string> tokens(std::string_view normalized) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= normalized.size()) {
    const std::size_t pos = normalized.find(' ', start);
    if (pos == std::string_view::npos) {
      if (start < normalized.size())
        out.emplace_back(normalized.substr(start));
      break;
    }
    if (pos > start) out.emplace_back(normalized.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

/// Levenshtein distance counted in code points.
inline std::size_t edit_distance(std::string_view a, std::string_view b) {
  const std::vector<char32_t> ua = decode_utf8(a);
  const std::vector<char32_t> ub = decode_utf8(b);
  if (ua.empty()) return ub.size();
  if (ub.empty()) return ua.size();
  std::vector<std::size_t> prev(ub.size() + 1);
  std::vector<std::size_t> cur(ub.size() + 1);
  for (std::size_t j = 0; j <= ub.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= ua.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= ub.size(); ++j) {
      const std::size_t cost = ua[i - 1] == ub[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
    }
    std::swap(prev, cur);
  }
  return prev[ub.size()];
}

inline std::size_t codepoint_count(std::string_view s) {
  return decode_utf8(s).size();
}

}  // namespace ctxalign::text
