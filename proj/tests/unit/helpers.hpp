// Copyright 2026 The LASP Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "lasp/space.hpp"

namespace lasp::test {

// Space with one parameter per entry of `arities`, values "0".."n-1".
inline ConfigSpace grid_space(const std::vector<std::size_t>& arities) {
  std::vector<ParameterDef> params;
  for (std::size_t p = 0; p < arities.size(); ++p) {
    ParameterDef def;
    def.name = "p" + std::to_string(p);
    def.substitution_token = "{" + def.name + "}";
    for (std::size_t v = 0; v < arities[p]; ++v) def.values.push_back(std::to_string(v));
    params.push_back(std::move(def));
  }
  return ConfigSpace(std::move(params), std::vector<std::size_t>(arities.size(), 0));
}

// Fresh, empty scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lasp_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace lasp::test
