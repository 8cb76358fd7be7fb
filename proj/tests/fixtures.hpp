#pragma once

#include <algorithm>
#include <filesystem>
#include <sstream>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "modgon/model.hpp"

namespace fixtures {

inline std::filesystem::path data_dir() { return MODGON_TEST_DATA; }

inline std::vector<std::filesystem::path> model_paths() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(data_dir() / "models"))
    if (e.path().extension() == ".model") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

inline modgon::QuadricModel model(const std::string& stem) {
  return modgon::load_model(data_dir() / "models" / (stem + ".model"));
}

// p -> (#X(F_p), #X(F_p^2)) from the Hecke-trace sidecar file.
inline std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> hecke_counts(
    const std::filesystem::path& model_path) {
  std::map<std::uint32_t, std::pair<std::uint64_t, std::uint64_t>> out;
  auto p = model_path;
  p.replace_extension(".counts");
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::uint32_t prime;
    std::uint64_t a, b;
    std::istringstream(line) >> prime >> a >> b;
    out[prime] = {a, b};
  }
  return out;
}

}  // namespace fixtures
