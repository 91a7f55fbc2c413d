//===--- Driver.hpp - CLI pipeline and report output -----------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/BugReport.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace minisa {

struct DbEntry {
  std::string Directory;
  std::string File;
  std::vector<std::string> Arguments;
  std::string ResolvedPath; // File resolved against Directory
};

std::optional<std::vector<DbEntry>>
loadCompilationDatabase(const std::string &Path, std::string *Error);

/// Issue hashes identify "the same" warning across edits: the digest covers
/// the checker, the enclosing function USR, the whitespace-normalized text of
/// the warning line, and the zero-based index of the token the warning column
/// points into. The inputs are joined with '\n' and hashed with SHA-256.
std::string computeIssueHash(const std::string &CheckerId,
                             const std::string &FnUsr,
                             const std::string &LineText, std::uint32_t Col);

/// Fills BugReport::IssueHash from the warning line's source text.
void assignIssueHashes(std::vector<BugReport> &Reports,
                       const std::map<std::string, std::vector<std::string>>
                           &SourceLines);

std::string plistForReports(const std::vector<BugReport> &Reports);

struct PlistEntry {
  std::string CheckName;
  std::string Description;
  std::string Hash;
  std::string File;
  std::uint32_t Line = 0;
  std::uint32_t Col = 0;
};
std::optional<std::vector<PlistEntry>> parsePlist(const std::string &Xml);

struct DiffResult {
  std::set<std::string> New, Resolved, Common;
  std::map<std::string, PlistEntry> Entries; // hash -> representative
};
std::optional<DiffResult> diffPlistDirs(const std::string &DirA,
                                        const std::string &DirB,
                                        std::string *Error);

/// Comment suppression: the warning line or the line above carries
/// `minisa-suppress <checker-id|all>`. Hash suppression: the issue hash is
/// listed in the suppression file (one hash per line, `#` comments).
void applySuppressions(std::vector<BugReport> &Reports,
                       const std::map<std::string, std::vector<std::string>>
                           &SourceLines,
                       const std::set<std::string> &SuppressedHashes);

std::string gcovTextForFile(const std::vector<std::string> &SourceLines,
                            const std::map<std::uint32_t, std::uint64_t>
                                &Counts,
                            const std::set<std::uint32_t> &Executable);

std::string htmlForReports(const std::vector<BugReport> &Reports);

/// Whole command-line entry point (`minisa analyze ...`, `minisa diff ...`).
/// Exit codes: 0 analysis ran clean, 1 reports found (or diff saw new ones),
/// 2 input error.
int runMain(const std::vector<std::string> &Args, std::ostream &Out,
            std::ostream &Err);

} // namespace minisa
