//===--- Ctu.hpp - Cross translation unit analysis support -----*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Two-pass scheme. Pass 1 parses every translation unit, serializes the ASTs
// into <dir>/asts/<stem>.ast and writes <dir>/index.txt mapping function USRs
// to those files (sorted, one `<usr> <relative-path>` pair per line). Pass 2
// is the regular analysis: when the engine meets a call to a body-less
// declaration it asks the CtuContext for the definition, which is imported
// into the requesting unit by structural copy. Two cache levels: a file is
// deserialized at most once per analysis, a USR imported at most once.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/AstIo.hpp"
#include "minisa/BugReport.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace minisa {

struct CtuIndex {
  std::map<std::string, std::string> DefinitionPaths; // USR -> relative path

  std::string toText() const;
  static std::optional<CtuIndex> fromText(const std::string &Text);
};

struct CtuPass1Result {
  std::string Dir;
  std::vector<std::string> Errors; // IndexConflict / OdrViolation / IO
  bool ok() const { return Errors.empty(); }
};

/// Parses the given (file path, source) pairs, serializes each unit and
/// builds the definition index. Conflicting function bodies for one USR and
/// record-layout mismatches across units are reported as errors;
/// byte-identical redefinitions are collapsed.
CtuPass1Result ctuPass1(const std::vector<std::pair<std::string, std::string>>
                            &Units,
                        const std::string &Dir);

/// Per-analysis loader with the two cache levels. Not thread-safe; each TU
/// analysis owns one.
class CtuContext {
public:
  explicit CtuContext(std::string Dir) : Dir(std::move(Dir)) {}

  /// Returns the imported definition, or null when the USR is not indexed or
  /// the ast file cannot be loaded (the engine then falls back to
  /// conservative evaluation). Definitions are imported into Unit with their
  /// original source locations.
  const FunctionDecl *loadExternalDefinition(const std::string &Usr, Ast &Unit,
                                             RunStats &Stats);

private:
  std::string Dir;
  std::optional<CtuIndex> Index; // loaded lazily
  bool IndexLoadFailed = false;
  std::map<std::string, std::unique_ptr<Ast>> LoadedFiles;     // level 1
  std::map<std::string, const FunctionDecl *> ImportedByUsr;   // level 2
  std::map<std::string, bool> FailedUsrs;

  const Ast *loadFile(const std::string &RelPath, RunStats &Stats);
};

/// Structural copy of an external definition (and anything it references)
/// into Dest. Record references map onto Dest records with the same USR when
/// the layout fingerprints match; missing records and globals are imported.
/// Returns null on a fingerprint mismatch.
const FunctionDecl *importFunction(const FunctionDecl &F, const Ast &Src,
                                   Ast &Dest, std::string *Error);

} // namespace minisa
