//===--- Sha256.hpp - SHA-256 digest --------------------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include <string>

namespace minisa {

/// Returns the SHA-256 digest of Data as a 64-character lowercase hex string.
std::string sha256Hex(const std::string &Data);

} // namespace minisa
