// Shared test utilities: deterministic random model generators, structural
// equality, and a harness for driving the CLI binary.
#pragma once

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ctxalign/ctxalign.hpp"

namespace testutil {

using namespace ctxalign;

// ---------------------------------------------------------------------------
// Random generators (fixed seeds at call sites keep runs reproducible)
// ---------------------------------------------------------------------------

inline std::string random_label(std::mt19937& rng, int min_tokens = 1,
                                int max_tokens = 3) {
  static const std::vector<std::string> kWords = {
      "legal",  "audit",   "trust",  "policy", "risk",   "public",
      "ethics", "culture", "review", "impact", "rights", "oversight"};
  std::uniform_int_distribution<int> n_tokens(min_tokens, max_tokens);
  std::uniform_int_distribution<std::size_t> word(0, kWords.size() - 1);
  std::string out;
  const int n = n_tokens(rng);
  for (int i = 0; i < n; ++i) {
    if (i > 0) out += " ";
    out += kWords[word(rng)];
  }
  return out;
}

/// Small random ontology with unique labels at every level.
inline Ontology random_ontology(std::mt19937& rng, int max_entities = 3,
                                int max_properties = 3,
                                int max_descriptors = 4,
                                bool allow_contextual = true) {
  std::uniform_int_distribution<int> n_ent(1, max_entities);
  std::uniform_int_distribution<int> n_prop(0, max_properties);
  std::uniform_int_distribution<int> n_dsc(0, max_descriptors);
  std::uniform_int_distribution<int> kind(0, 1);
  std::uniform_int_distribution<std::uint64_t> sources(0, 100);

  std::vector<RawEntity> entities;
  const int ne = n_ent(rng);
  for (int e = 0; e < ne; ++e) {
    RawEntity re;
    re.name = "entity " + std::to_string(e);
    const int np = n_prop(rng);
    for (int p = 0; p < np; ++p) {
      RawProperty rp;
      rp.name = "prop " + std::to_string(p) + " " + random_label(rng, 1, 1);
      const int nd = n_dsc(rng);
      for (int d = 0; d < nd; ++d) {
        RawDescriptor rd;
        rd.label = "d" + std::to_string(d) + " " + random_label(rng);
        rd.kind = (allow_contextual && kind(rng) == 1)
                      ? DescriptorKind::Contextual
                      : DescriptorKind::Essential;
        rd.source_count = sources(rng);
        rp.descriptors.push_back(std::move(rd));
      }
      re.properties.push_back(std::move(rp));
    }
    entities.push_back(std::move(re));
  }
  return build_ontology("random", entities);
}

inline std::vector<MatchedPair> random_pairs(std::mt19937& rng, int min_n,
                                             int max_n) {
  std::uniform_int_distribution<int> count(min_n, max_n);
  std::uniform_real_distribution<double> sim(0.0, 1.0);
  std::uniform_real_distribution<double> src(0.0, 100.0);
  std::uniform_int_distribution<int> kind(0, 1);
  std::vector<MatchedPair> pairs;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    MatchedPair p;
    p.source = DescriptorId("e/p/s" + std::to_string(i));
    p.target = DescriptorId("e/p/t" + std::to_string(i));
    p.kind = kind(rng) == 0 ? DescriptorKind::Essential
                            : DescriptorKind::Contextual;
    p.similarity = sim(rng);
    p.sources = src(rng);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Structural equality
// ---------------------------------------------------------------------------

inline bool equal_ontology(const Ontology& a, const Ontology& b) {
  if (a.name != b.name || a.entities.size() != b.entities.size()) return false;
  for (std::size_t e = 0; e < a.entities.size(); ++e) {
    const Entity& ea = a.entities[e];
    const Entity& eb = b.entities[e];
    if (ea.id != eb.id || ea.name != eb.name ||
        ea.properties.size() != eb.properties.size())
      return false;
    for (std::size_t p = 0; p < ea.properties.size(); ++p) {
      const Property& pa = ea.properties[p];
      const Property& pb = eb.properties[p];
      if (pa.id != pb.id || pa.name != pb.name || pa.value != pb.value ||
          pa.descriptors.size() != pb.descriptors.size())
        return false;
      for (std::size_t d = 0; d < pa.descriptors.size(); ++d) {
        const Descriptor& da = pa.descriptors[d];
        const Descriptor& db = pb.descriptors[d];
        if (da.id != db.id || da.label != db.label || da.kind != db.kind ||
            da.source_count != db.source_count)
          return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Temp files and CLI harness
// ---------------------------------------------------------------------------

inline std::filesystem::path temp_path(const std::string& suffix) {
  static int counter = 0;
  return std::filesystem::temp_directory_path() /
         ("ctxalign_test_" + std::to_string(::getpid()) + "_" +
          std::to_string(counter++) + suffix);
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& suffix,
                    const std::string& contents = "")
      : path(temp_path(suffix)) {
    if (!contents.empty()) ctxalign::io::write_file(path, contents);
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
  std::string str() const { return path.string(); }
};

#ifdef CTXALIGN_CLI_PATH

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

inline CliResult run_cli(const std::string& args) {
  const std::filesystem::path out_path = temp_path(".out");
  const std::filesystem::path err_path = temp_path(".err");
  const std::string cmd = std::string(CTXALIGN_CLI_PATH) + " " + args + " > " +
                          out_path.string() + " 2> " + err_path.string();
  const int status = std::system(cmd.c_str());

  CliResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
  };
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::error_code ec;
  std::filesystem::remove(out_path, ec);
  std::filesystem::remove(err_path, ec);
  return result;
}

#endif  // CTXALIGN_CLI_PATH

}  // namespace testutil
