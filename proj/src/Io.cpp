//===--- Io.cpp - Small file helpers ------------------------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Support/Io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace minisa {

std::optional<std::string> readFile(const std::string &Path) {
  std::ifstream In(Path, std::ios::binary);
  if (!In)
    return std::nullopt;
  std::ostringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

bool writeFile(const std::string &Path, const std::string &Content) {
  std::ofstream Out(Path, std::ios::binary | std::ios::trunc);
  if (!Out)
    return false;
  Out << Content;
  return Out.good();
}

bool ensureDir(const std::string &Path) {
  std::error_code EC;
  std::filesystem::create_directories(Path, EC);
  return !EC || std::filesystem::is_directory(Path);
}

std::vector<std::string> listFiles(const std::string &Dir,
                                   const std::string &Ext) {
  std::vector<std::string> Out;
  std::error_code EC;
  for (const auto &Entry : std::filesystem::directory_iterator(Dir, EC)) {
    if (!Entry.is_regular_file())
      continue;
    std::string Name = Entry.path().string();
    if (Name.size() >= Ext.size() &&
        Name.compare(Name.size() - Ext.size(), Ext.size(), Ext) == 0)
      Out.push_back(Name);
  }
  std::sort(Out.begin(), Out.end());
  return Out;
}

std::string baseNameOf(const std::string &Path) {
  return std::filesystem::path(Path).filename().string();
}

std::string stemOf(const std::string &Path) {
  return std::filesystem::path(Path).stem().string();
}

} // namespace minisa
