//===--- Io.hpp - Small file helpers ---------------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace minisa {

std::optional<std::string> readFile(const std::string &Path);
bool writeFile(const std::string &Path, const std::string &Content);
bool ensureDir(const std::string &Path);

/// Regular files directly inside Dir whose names end with Ext, sorted.
std::vector<std::string> listFiles(const std::string &Dir,
                                   const std::string &Ext);

std::string baseNameOf(const std::string &Path);
std::string stemOf(const std::string &Path); // basename without extension

} // namespace minisa
