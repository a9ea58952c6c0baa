#!/usr/bin/env python3
"""Regenerates include/ctxalign/unicode_tables.hpp from Python's unicodedata.

Emits three sorted constant tables:
  - full case folding (entries whose fold differs from the identity),
  - canonical combining classes (nonzero only),
  - primary canonical composition pairs (Hangul excluded; composed
    algorithmically at runtime).

Run from the repository root:  python3 tools/gen_unicode_tables.py
"""

import sys
import unicodedata

OUT = "include/ctxalign/unicode_tables.hpp"


def case_folds():
    rows = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        folded = chr(cp).casefold()
        if folded == chr(cp):
            continue
        out = [ord(c) for c in folded]
        if len(out) > 3:
            raise SystemExit(f"fold of U+{cp:04X} longer than 3 code points")
        out += [0] * (3 - len(out))
        rows.append((cp, out))
    return rows


def combining_classes():
    rows = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        ccc = unicodedata.combining(chr(cp))
        if ccc:
            rows.append((cp, ccc))
    return rows


def composition_pairs():
    rows = []
    for cp in range(0x110000):
        if 0xD800 <= cp <= 0xDFFF:
            continue
        if 0xAC00 <= cp <= 0xD7A3:  # Hangul syllables: algorithmic
            continue
        decomp = unicodedata.decomposition(chr(cp))
        if not decomp or decomp.startswith("<"):
            continue
        parts = decomp.split()
        if len(parts) != 2:
            continue
        first, second = int(parts[0], 16), int(parts[1], 16)
        # Primary composites only: exclusions never recompose under NFC.
        if unicodedata.normalize("NFC", chr(first) + chr(second)) != chr(cp):
            continue
        rows.append((first, second, cp))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def main():
    folds = case_folds()
    cccs = combining_classes()
    pairs = composition_pairs()

    with open(OUT, "w", encoding="utf-8") as f:
        w = f.write
        w("// Generated by tools/gen_unicode_tables.py (Unicode data version "
          f"{unicodedata.unidata_version}). Do not edit by hand.\n")
        w("#pragma once\n\n")
        w("#include <cstdint>\n\n")
        w("namespace ctxalign::unicode {\n\n")

        w("struct CaseFoldEntry {\n  char32_t cp;\n  char32_t out[3];  // zero-padded\n};\n\n")
        w(f"inline constexpr CaseFoldEntry kCaseFolds[{len(folds)}] = {{\n")
        for cp, out in folds:
            w("    {0x%X, {0x%X, 0x%X, 0x%X}},\n" % (cp, out[0], out[1], out[2]))
        w("};\n\n")

        w("struct CombiningClassEntry {\n  char32_t cp;\n  std::uint8_t ccc;\n};\n\n")
        w(f"inline constexpr CombiningClassEntry kCombiningClasses[{len(cccs)}] = {{\n")
        for cp, ccc in cccs:
            w("    {0x%X, %d},\n" % (cp, ccc))
        w("};\n\n")

        w("struct CompositionEntry {\n  char32_t first;\n  char32_t second;\n  char32_t composed;\n};\n\n")
        w(f"inline constexpr CompositionEntry kCompositions[{len(pairs)}] = {{\n")
        for first, second, cp in pairs:
            w("    {0x%X, 0x%X, 0x%X},\n" % (first, second, cp))
        w("};\n\n")

        w("}  // namespace ctxalign::unicode\n")

    print(f"wrote {OUT}: {len(folds)} folds, {len(cccs)} combining classes, "
          f"{len(pairs)} composition pairs", file=sys.stderr)


if __name__ == "__main__":
    main()
