//===--- Driver.cpp - CLI pipeline and report output ---------------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Driver.hpp"

#include "minisa/Cfg.hpp"
#include "minisa/Ctu.hpp"
#include "minisa/Engine.hpp"
#include "minisa/Refutation.hpp"
#include "minisa/Support/Io.hpp"
#include "minisa/Support/Sha256.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <thread>

namespace minisa {

//===----------------------------------------------------------------------===//
// Compilation database
//===----------------------------------------------------------------------===//

std::optional<std::vector<DbEntry>>
loadCompilationDatabase(const std::string &Path, std::string *Error) {
  std::optional<std::string> Text = readFile(Path);
  if (!Text) {
    if (Error)
      *Error = "cannot read compilation database " + Path;
    return std::nullopt;
  }
  nlohmann::json J = nlohmann::json::parse(*Text, nullptr, false);
  if (!J.is_array()) {
    if (Error)
      *Error = "malformed compilation database " + Path;
    return std::nullopt;
  }
  std::vector<DbEntry> Entries;
  for (const auto &Obj : J) {
    if (!Obj.is_object() || !Obj.contains("file")) {
      if (Error)
        *Error = "malformed compilation database entry";
      return std::nullopt;
    }
    DbEntry E;
    E.File = Obj["file"].get<std::string>();
    if (Obj.contains("directory"))
      E.Directory = Obj["directory"].get<std::string>();
    if (Obj.contains("arguments") && Obj["arguments"].is_array())
      for (const auto &A : Obj["arguments"])
        E.Arguments.push_back(A.get<std::string>());
    else if (Obj.contains("command") && Obj["command"].is_string()) {
      std::istringstream SS(Obj["command"].get<std::string>());
      std::string Word;
      while (SS >> Word)
        E.Arguments.push_back(Word);
    }
    std::filesystem::path P(E.File);
    if (P.is_relative() && !E.Directory.empty())
      P = std::filesystem::path(E.Directory) / P;
    E.ResolvedPath = P.string();
    Entries.push_back(std::move(E));
  }
  return Entries;
}

//===----------------------------------------------------------------------===//
// Issue hashes
//===----------------------------------------------------------------------===//

static std::string normalizeWhitespace(const std::string &Line) {
  std::string Out;
  bool InSpace = true; // strips leading space too
  for (char C : Line) {
    if (std::isspace(static_cast<unsigned char>(C))) {
      InSpace = true;
      continue;
    }
    if (InSpace && !Out.empty())
      Out.push_back(' ');
    InSpace = false;
    Out.push_back(C);
  }
  return Out;
}

// Zero-based index of the whitespace-separated token the 1-based column
// points into (or the count of tokens before it when it points at space).
static std::uint32_t tokenIndexAt(const std::string &Line, std::uint32_t Col) {
  std::uint32_t Idx = 0;
  bool InToken = false;
  for (std::uint32_t I = 0; I < Line.size(); ++I) {
    bool Space = std::isspace(static_cast<unsigned char>(Line[I])) != 0;
    if (!Space && !InToken) {
      InToken = true;
    } else if (Space && InToken) {
      ++Idx;
      InToken = false;
    }
    if (I + 1 == Col)
      return Idx;
  }
  return InToken ? Idx : Idx;
}

std::string computeIssueHash(const std::string &CheckerId,
                             const std::string &FnUsr,
                             const std::string &LineText, std::uint32_t Col) {
  std::string Input = CheckerId + "\n" + FnUsr + "\n" +
                      normalizeWhitespace(LineText) + "\n" +
                      std::to_string(tokenIndexAt(LineText, Col));
  return sha256Hex(Input);
}

void assignIssueHashes(std::vector<BugReport> &Reports,
                       const std::map<std::string, std::vector<std::string>>
                           &SourceLines) {
  for (BugReport &R : Reports) {
    std::string LineText;
    auto It = SourceLines.find(R.WarnLoc.File);
    if (It != SourceLines.end() && R.WarnLoc.Line >= 1 &&
        R.WarnLoc.Line <= It->second.size())
      LineText = It->second[R.WarnLoc.Line - 1];
    R.IssueHash = computeIssueHash(R.CheckerId, R.FnUsr, LineText,
                                   R.WarnLoc.Col);
  }
}

//===----------------------------------------------------------------------===//
// plist
//===----------------------------------------------------------------------===//

static std::string xmlEscape(const std::string &S) {
  std::string Out;
  for (char C : S) {
    switch (C) {
    case '&': Out += "&amp;"; break;
    case '<': Out += "&lt;"; break;
    case '>': Out += "&gt;"; break;
    case '"': Out += "&quot;"; break;
    default: Out.push_back(C);
    }
  }
  return Out;
}

static std::string xmlUnescape(const std::string &S) {
  std::string Out;
  for (std::size_t I = 0; I < S.size();) {
    if (S[I] != '&') {
      Out.push_back(S[I++]);
      continue;
    }
    auto Try = [&](const char *Ent, char Ch) {
      std::size_t Len = std::string(Ent).size();
      if (S.compare(I, Len, Ent) == 0) {
        Out.push_back(Ch);
        I += Len;
        return true;
      }
      return false;
    };
    if (!Try("&amp;", '&') && !Try("&lt;", '<') && !Try("&gt;", '>') &&
        !Try("&quot;", '"'))
      Out.push_back(S[I++]);
  }
  return Out;
}

std::string plistForReports(const std::vector<BugReport> &Reports) {
  // File table: first use wins, warning files before event-only files.
  std::vector<std::string> Files;
  auto fileIndex = [&](const std::string &Name) {
    for (std::size_t I = 0; I < Files.size(); ++I)
      if (Files[I] == Name)
        return I;
    Files.push_back(Name);
    return Files.size() - 1;
  };
  for (const BugReport &R : Reports)
    for (const std::string &F : R.referencedFiles())
      fileIndex(F);

  std::ostringstream OS;
  auto locDict = [&](const ResolvedLoc &L, int Indent) {
    std::string Pad(std::size_t(Indent), ' ');
    OS << Pad << "<dict>\n";
    OS << Pad << " <key>file</key><integer>" << fileIndex(L.File)
       << "</integer>\n";
    OS << Pad << " <key>line</key><integer>" << L.Line << "</integer>\n";
    OS << Pad << " <key>col</key><integer>" << L.Col << "</integer>\n";
    OS << Pad << "</dict>\n";
  };

  std::ostringstream Body;
  std::swap(OS, Body); // build diagnostics first so the file table is final

  OS << " <key>diagnostics</key>\n <array>\n";
  for (const BugReport &R : Reports) {
    OS << "  <dict>\n";
    OS << "   <key>check_name</key><string>" << xmlEscape(R.CheckerId)
       << "</string>\n";
    OS << "   <key>description</key><string>" << xmlEscape(R.Message)
       << "</string>\n";
    OS << "   <key>issue_hash</key><string>" << R.IssueHash << "</string>\n";
    OS << "   <key>location</key>\n";
    locDict(R.WarnLoc, 3);
    OS << "   <key>path</key>\n   <array>\n";
    for (const PathEvent &E : R.Path) {
      OS << "    <dict>\n";
      OS << "     <key>kind</key><string>" << pathEventKindName(E.K)
         << "</string>\n";
      OS << "     <key>location</key>\n";
      locDict(E.Loc, 5);
      OS << "     <key>message</key><string>" << xmlEscape(E.Msg)
         << "</string>\n";
      OS << "    </dict>\n";
    }
    OS << "   </array>\n";
    OS << "  </dict>\n";
  }
  OS << " </array>\n";
  std::string Diagnostics = OS.str();
  std::swap(OS, Body);

  OS << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  OS << "<plist version=\"1.0\">\n<dict>\n";
  OS << " <key>files</key>\n <array>\n";
  for (const std::string &F : Files)
    OS << "  <string>" << xmlEscape(F) << "</string>\n";
  OS << " </array>\n";
  OS << Diagnostics;
  OS << "</dict>\n</plist>\n";
  return OS.str();
}

// Reads back the subset of our own plist output the diff needs. Scans by
// structure rather than full XML parsing; the emitter is deterministic.
std::optional<std::vector<PlistEntry>> parsePlist(const std::string &Xml) {
  auto grab = [&](std::size_t From, const std::string &Open,
                  const std::string &Close,
                  std::size_t Limit) -> std::optional<std::string> {
    std::size_t B = Xml.find(Open, From);
    if (B == std::string::npos || B >= Limit)
      return std::nullopt;
    B += Open.size();
    std::size_t E = Xml.find(Close, B);
    if (E == std::string::npos)
      return std::nullopt;
    return Xml.substr(B, E - B);
  };

  if (Xml.find("<plist") == std::string::npos)
    return std::nullopt;

  // File table.
  std::vector<std::string> Files;
  std::size_t FilesPos = Xml.find("<key>files</key>");
  std::size_t DiagPos = Xml.find("<key>diagnostics</key>");
  if (FilesPos == std::string::npos || DiagPos == std::string::npos)
    return std::nullopt;
  std::size_t Cursor = FilesPos;
  while (true) {
    auto S = grab(Cursor, "<string>", "</string>", DiagPos);
    if (!S)
      break;
    Files.push_back(xmlUnescape(*S));
    Cursor = Xml.find("</string>", Cursor) + 1;
  }

  std::vector<PlistEntry> Out;
  std::size_t Pos = DiagPos;
  while (true) {
    std::size_t Next = Xml.find("<key>check_name</key>", Pos);
    if (Next == std::string::npos)
      break;
    std::size_t End = Xml.find("<key>check_name</key>", Next + 1);
    if (End == std::string::npos)
      End = Xml.size();
    PlistEntry E;
    auto Name = grab(Next, "<string>", "</string>", End);
    auto Desc = grab(Next, "<key>description</key><string>", "</string>", End);
    auto Hash = grab(Next, "<key>issue_hash</key><string>", "</string>", End);
    std::size_t LocPos = Xml.find("<key>location</key>", Next);
    if (!Name || !Desc || !Hash || LocPos == std::string::npos ||
        LocPos >= End)
      return std::nullopt;
    auto FileIdx = grab(LocPos, "<key>file</key><integer>", "</integer>", End);
    auto Line = grab(LocPos, "<key>line</key><integer>", "</integer>", End);
    auto Col = grab(LocPos, "<key>col</key><integer>", "</integer>", End);
    if (!FileIdx || !Line || !Col)
      return std::nullopt;
    E.CheckName = xmlUnescape(*Name);
    E.Description = xmlUnescape(*Desc);
    E.Hash = *Hash;
    std::size_t Idx = std::size_t(std::stoul(*FileIdx));
    E.File = Idx < Files.size() ? Files[Idx] : "<unknown>";
    E.Line = std::uint32_t(std::stoul(*Line));
    E.Col = std::uint32_t(std::stoul(*Col));
    Out.push_back(std::move(E));
    Pos = Next + 1;
  }
  return Out;
}

std::optional<DiffResult> diffPlistDirs(const std::string &DirA,
                                        const std::string &DirB,
                                        std::string *Error) {
  auto collect = [&](const std::string &Dir,
                     std::map<std::string, PlistEntry> &Into) -> bool {
    for (const std::string &Path : listFiles(Dir, ".plist")) {
      std::optional<std::string> Text = readFile(Path);
      if (!Text) {
        if (Error)
          *Error = "cannot read " + Path;
        return false;
      }
      auto Entries = parsePlist(*Text);
      if (!Entries) {
        if (Error)
          *Error = "unreadable plist " + Path;
        return false;
      }
      for (PlistEntry &E : *Entries)
        Into.emplace(E.Hash, std::move(E));
    }
    return true;
  };

  std::map<std::string, PlistEntry> A, B;
  if (!collect(DirA, A) || !collect(DirB, B))
    return std::nullopt;

  DiffResult D;
  for (auto &[Hash, E] : A) {
    if (B.count(Hash))
      D.Common.insert(Hash);
    else
      D.Resolved.insert(Hash);
    D.Entries.emplace(Hash, E);
  }
  for (auto &[Hash, E] : B) {
    if (!A.count(Hash))
      D.New.insert(Hash);
    D.Entries.emplace(Hash, E);
  }
  return D;
}

//===----------------------------------------------------------------------===//
// Suppression
//===----------------------------------------------------------------------===//

static bool lineSuppresses(const std::string &Line,
                           const std::string &CheckerId) {
  std::size_t Pos = Line.find("minisa-suppress");
  if (Pos == std::string::npos)
    return false;
  std::istringstream SS(Line.substr(Pos + std::string("minisa-suppress").size()));
  std::string Tok;
  while (SS >> Tok)
    if (Tok == "all" || Tok == CheckerId)
      return true;
  return false;
}

void applySuppressions(std::vector<BugReport> &Reports,
                       const std::map<std::string, std::vector<std::string>>
                           &SourceLines,
                       const std::set<std::string> &SuppressedHashes) {
  for (BugReport &R : Reports) {
    if (R.Suppressed)
      continue;
    if (SuppressedHashes.count(R.IssueHash)) {
      R.Suppressed = true;
      R.SuppressReason = "suppression-file";
      continue;
    }
    auto It = SourceLines.find(R.WarnLoc.File);
    if (It == SourceLines.end())
      continue;
    const std::vector<std::string> &Lines = It->second;
    for (std::uint32_t L : {R.WarnLoc.Line, R.WarnLoc.Line - 1}) {
      if (L >= 1 && L <= Lines.size() &&
          lineSuppresses(Lines[L - 1], R.CheckerId)) {
        R.Suppressed = true;
        R.SuppressReason = "suppress-comment";
        break;
      }
    }
  }
}

//===----------------------------------------------------------------------===//
// Coverage and HTML output
//===----------------------------------------------------------------------===//

std::string gcovTextForFile(const std::vector<std::string> &SourceLines,
                            const std::map<std::uint32_t, std::uint64_t>
                                &Counts,
                            const std::set<std::uint32_t> &Executable) {
  std::ostringstream OS;
  for (std::uint32_t L = 1; L <= SourceLines.size(); ++L) {
    auto It = Counts.find(L);
    if (It != Counts.end() && It->second > 0)
      OS << It->second;
    else if (Executable.count(L))
      OS << 0;
    else
      OS << "-";
    OS << ":" << L << ":" << SourceLines[L - 1] << "\n";
  }
  return OS.str();
}

std::string htmlForReports(const std::vector<BugReport> &Reports) {
  std::ostringstream OS;
  OS << "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n"
     << "<title>minisa analysis report</title>\n"
     << "<style>body{font-family:monospace}table{border-collapse:collapse}"
     << "td,th{border:1px solid #999;padding:4px 8px}</style>\n"
     << "</head>\n<body>\n<h1>minisa analysis report</h1>\n";
  OS << "<p>" << Reports.size() << " report(s)</p>\n";
  OS << "<table>\n<tr><th>#</th><th>checker</th><th>location</th>"
     << "<th>message</th></tr>\n";
  for (std::size_t I = 0; I < Reports.size(); ++I) {
    const BugReport &R = Reports[I];
    OS << "<tr><td>" << I + 1 << "</td><td>" << xmlEscape(R.CheckerId)
       << "</td><td>" << xmlEscape(R.WarnLoc.File) << ":" << R.WarnLoc.Line
       << ":" << R.WarnLoc.Col << "</td><td>" << xmlEscape(R.Message)
       << "</td></tr>\n";
  }
  OS << "</table>\n";
  for (std::size_t I = 0; I < Reports.size(); ++I) {
    const BugReport &R = Reports[I];
    OS << "<details>\n<summary>#" << I + 1 << " " << xmlEscape(R.Message)
       << " (" << R.IssueHash.substr(0, 12) << ")</summary>\n<ol>\n";
    for (const PathEvent &E : R.Path)
      OS << "<li>[" << pathEventKindName(E.K) << "] "
         << xmlEscape(E.Loc.File) << ":" << E.Loc.Line << ":" << E.Loc.Col
         << " &mdash; " << xmlEscape(E.Msg) << "</li>\n";
    OS << "</ol>\n</details>\n";
  }
  OS << "</body>\n</html>\n";
  return OS.str();
}

//===----------------------------------------------------------------------===//
// runMain
//===----------------------------------------------------------------------===//

namespace {

std::vector<std::string> splitLines(const std::string &Text) {
  std::vector<std::string> Lines;
  std::string Cur;
  for (char C : Text) {
    if (C == '\n') {
      Lines.push_back(Cur);
      Cur.clear();
    } else {
      Cur.push_back(C);
    }
  }
  if (!Cur.empty())
    Lines.push_back(Cur);
  return Lines;
}

struct TuJob {
  std::string Path;   // resolved path used for IO
  std::string Source;
};

struct TuOutcome {
  std::vector<BugReport> Reports; // all, including suppressed
  CoverageMap Coverage;
  RunStats Stats;
  std::vector<std::pair<std::string, std::string>> SmtFiles; // hash -> text
  std::vector<std::string> Errors;
};

} // namespace

int runMain(const std::vector<std::string> &Args, std::ostream &Out,
            std::ostream &Err) {
  CLI::App App{"minisa: a path-sensitive static analyzer for MiniC"};
  App.require_subcommand(1);

  // analyze ------------------------------------------------------------------
  CLI::App *Analyze =
      App.add_subcommand("analyze", "analyze translation units");
  std::vector<std::string> Inputs;
  Analyze->add_option("inputs", Inputs,
                      "compile_commands.json or .mc source files")
      ->required();
  std::string OutputDir = "minisa-out";
  Analyze->add_option("--output-dir", OutputDir, "output directory");
  bool CtuEnabled = false;
  Analyze->add_flag("--ctu", CtuEnabled, "cross translation unit analysis");
  std::string CtuDir;
  Analyze->add_option("--ctu-dir", CtuDir, "directory for CTU artifacts");
  std::string StrategyName = "unexplored-first";
  Analyze->add_option("--strategy", StrategyName,
                      "dfs | bfs | unexplored-first");
  AnalysisOptions Opts;
  Analyze->add_option("--max-nodes", Opts.Limits.MaxNodesPerTopLevel,
                      "exploded-graph node budget per top-level function");
  Analyze->add_option("--max-inline-depth", Opts.Limits.MaxInlineDepth,
                      "maximal call stack depth for inlining");
  Analyze->add_option("--max-block-visits", Opts.Limits.MaxBlockVisitsPerPath,
                      "times one path may revisit a basic block");
  Analyze->add_option("--max-inline-size", Opts.Limits.MaxInlineSize,
                      "largest callee (basic blocks) to inline");
  Analyze->add_option("--unroll-limit", Opts.Limits.UnrollLimit,
                      "loop iterations explored per path");
  Analyze->add_flag("--widen-loops", Opts.WidenLoops,
                    "over-approximate loops after the unroll budget");
  bool Refute = false;
  Analyze->add_flag("--refute", Refute, "drop reports on infeasible paths");
  unsigned RefuteWidth = 8;
  Analyze->add_option("--refute-width", RefuteWidth, "4, 8 or 16")
      ->check(CLI::IsMember({4, 8, 16}));
  std::string EmitSmtDir;
  Analyze->add_option("--emit-smt", EmitSmtDir,
                      "write an SMT-LIB script per report");
  bool WriteCoverage = false;
  Analyze->add_flag("--coverage", WriteCoverage,
                    "write per-line gcov-style coverage");
  std::string Format = "plist";
  Analyze->add_option("--format", Format, "plist | html | both")
      ->check(CLI::IsMember({"plist", "html", "both"}));
  std::string SuppressFile;
  Analyze->add_option("--suppress-file", SuppressFile,
                      "file of issue hashes to suppress");
  unsigned Jobs = 1;
  Analyze->add_option("--jobs", Jobs, "parallel translation-unit analyses");
  bool DumpCfg = false;
  Analyze->add_flag("--dump-cfg", DumpCfg, "print control flow graphs");
  bool PrintStats = false;
  Analyze->add_flag("--stats", PrintStats, "print STAT lines");

  // diff ------------------------------------------------------------------
  CLI::App *Diff = App.add_subcommand("diff", "compare two result dirs");
  std::string DirA, DirB;
  Diff->add_option("dirA", DirA, "baseline plist directory")->required();
  Diff->add_option("dirB", DirB, "new plist directory")->required();

  std::vector<std::string> Argv = Args;
  std::vector<const char *> Cargv{"minisa"};
  for (const std::string &A : Argv)
    Cargv.push_back(A.c_str());
  try {
    App.parse(int(Cargv.size()), Cargv.data());
  } catch (const CLI::ParseError &E) {
    if (E.get_exit_code() == 0) { // --help
      Out << App.help();
      return 0;
    }
    Err << "error: " << E.what() << "\n";
    return 2;
  }

  //--- diff -------------------------------------------------------------------
  if (Diff->parsed()) {
    std::string Error;
    std::optional<DiffResult> D = diffPlistDirs(DirA, DirB, &Error);
    if (!D) {
      Err << "error: " << Error << "\n";
      return 2;
    }
    auto printSet = [&](const char *Label, const std::set<std::string> &Set) {
      Out << Label << ": " << Set.size() << "\n";
      for (const std::string &H : Set) {
        const PlistEntry &E = D->Entries.at(H);
        Out << "  " << E.CheckName << " " << E.File << ":" << E.Line << ":"
            << E.Col << " " << E.Description << " [" << H << "]\n";
      }
    };
    printSet("NEW", D->New);
    printSet("RESOLVED", D->Resolved);
    Out << "COMMON: " << D->Common.size() << "\n";
    return D->New.empty() ? 0 : 1;
  }

  //--- analyze ----------------------------------------------------------------
  if (StrategyName == "dfs")
    Opts.Strategy = ExplorationStrategy::Dfs;
  else if (StrategyName == "bfs")
    Opts.Strategy = ExplorationStrategy::Bfs;
  else if (StrategyName == "unexplored-first")
    Opts.Strategy = ExplorationStrategy::UnexploredFirst;
  else {
    Err << "error: unknown strategy '" << StrategyName << "'\n";
    return 2;
  }

  // Resolve the inputs into translation-unit jobs.
  std::vector<TuJob> Jobs_;
  bool IsDb = Inputs.size() == 1 &&
              (Inputs[0].ends_with(".json") ||
               baseNameOf(Inputs[0]).rfind("compile_commands", 0) == 0);
  if (IsDb) {
    std::string Error;
    auto Db = loadCompilationDatabase(Inputs[0], &Error);
    if (!Db) {
      Err << "error: " << Error << "\n";
      return 2;
    }
    for (const DbEntry &E : *Db)
      Jobs_.push_back({E.ResolvedPath, ""});
  } else {
    for (const std::string &F : Inputs)
      Jobs_.push_back({F, ""});
  }
  for (TuJob &J : Jobs_) {
    std::optional<std::string> Src = readFile(J.Path);
    if (!Src) {
      Err << "error: cannot read " << J.Path << "\n";
      return 2;
    }
    J.Source = *Src;
  }

  if (!ensureDir(OutputDir)) {
    Err << "error: cannot create output directory " << OutputDir << "\n";
    return 2;
  }

  std::set<std::string> SuppressedHashes;
  if (!SuppressFile.empty()) {
    std::optional<std::string> Text = readFile(SuppressFile);
    if (!Text) {
      Err << "error: cannot read suppression file " << SuppressFile << "\n";
      return 2;
    }
    for (std::string Line : splitLines(*Text)) {
      std::size_t Hash = Line.find('#');
      if (Hash != std::string::npos)
        Line = Line.substr(0, Hash);
      std::istringstream SS(Line);
      std::string Tok;
      while (SS >> Tok)
        SuppressedHashes.insert(Tok);
    }
  }

  // Sources by file name: issue hashes, comment suppression and coverage all
  // need the text.
  std::map<std::string, std::vector<std::string>> SourceLines;
  for (const TuJob &J : Jobs_)
    SourceLines[J.Path] = splitLines(J.Source);

  if (DumpCfg) {
    for (const TuJob &J : Jobs_) {
      ParseResult PR = parseTranslationUnit(J.Source, J.Path);
      if (!PR.ok())
        continue;
      for (const FunctionDecl *F : PR.Unit->Functions)
        if (F->hasBody() && !F->Builtin) {
          auto G = buildCfg(*F, *PR.Unit);
          Out << "; CFG for " << F->Usr << " (" << J.Path << ")\n"
              << dumpCfg(*G);
        }
    }
  }

  // CTU pass 1.
  if (CtuEnabled) {
    if (CtuDir.empty())
      CtuDir = OutputDir + "/ctu";
    std::vector<std::pair<std::string, std::string>> Units;
    for (const TuJob &J : Jobs_)
      Units.push_back({J.Path, J.Source});
    CtuPass1Result P1 = ctuPass1(Units, CtuDir);
    if (!P1.ok()) {
      for (const std::string &E : P1.Errors)
        Err << "error: " << E << "\n";
      return 2;
    }
  }

  // Pass 2: per-TU analyses, optionally in a worker pool. Each slot is
  // independent; merging happens in database order, so the result does not
  // depend on scheduling.
  std::vector<TuOutcome> Outcomes(Jobs_.size());
  std::atomic<std::size_t> NextJob{0};
  auto Worker = [&]() {
    while (true) {
      std::size_t I = NextJob.fetch_add(1);
      if (I >= Jobs_.size())
        return;
      const TuJob &J = Jobs_[I];
      TuOutcome &O = Outcomes[I];

      ParseResult PR = parseTranslationUnit(J.Source, J.Path);
      if (!PR.ok()) {
        for (const Diagnostic &D : PR.Diags)
          O.Errors.push_back(J.Path + ":" + std::to_string(D.Loc.Line) + ":" +
                             std::to_string(D.Loc.Col) + ": " +
                             (D.K == Diagnostic::Kind::SyntaxError
                                  ? "syntax error: "
                                  : "type error: ") +
                             D.Message);
        continue;
      }

      std::unique_ptr<CtuContext> Ctu;
      if (CtuEnabled)
        Ctu = std::make_unique<CtuContext>(CtuDir);
      TuAnalysisResult TR = analyzeTu(*PR.Unit, Opts, Ctu.get());
      O.Reports = std::move(TR.Reports);
      O.Coverage = std::move(TR.Coverage);
      O.Stats = std::move(TR.Stats);

      assignIssueHashes(O.Reports, SourceLines);
      applySuppressions(O.Reports, SourceLines, SuppressedHashes);

      if (!EmitSmtDir.empty())
        for (const BugReport &R : O.Reports) {
          if (R.Suppressed)
            continue;
          if (std::optional<std::string> Smt = emitSmtLib(R.Conditions, 32))
            O.SmtFiles.push_back({R.IssueHash, *Smt});
          else
            O.Stats.bump("smt_unsupported_fragment");
        }

      RefuteOptions RO;
      RO.Enabled = Refute;
      RO.Width = RefuteWidth;
      refuteReports(O.Reports, RO, O.Stats);
    }
  };
  {
    unsigned N = std::max(1u, Jobs);
    std::vector<std::thread> Pool;
    for (unsigned I = 1; I < N; ++I)
      Pool.emplace_back(Worker);
    Worker();
    for (std::thread &T : Pool)
      T.join();
  }

  bool InputError = false;
  for (const TuOutcome &O : Outcomes)
    for (const std::string &E : O.Errors) {
      Err << "error: " << E << "\n";
      InputError = true;
    }
  if (InputError)
    return 2;

  // Deterministic merge in database order.
  RunStats Stats;
  CoverageMap Coverage;
  std::size_t EmittedReports = 0;
  std::map<std::string, int> StemUses;
  for (std::size_t I = 0; I < Jobs_.size(); ++I) {
    TuOutcome &O = Outcomes[I];
    Stats.mergeFrom(O.Stats);
    Coverage.mergeFrom(O.Coverage);

    std::vector<BugReport> Visible;
    for (BugReport &R : O.Reports) {
      if (R.Suppressed) {
        Stats.bump("suppressed_reports");
        continue;
      }
      Visible.push_back(R);
    }
    EmittedReports += Visible.size();

    std::string Stem = stemOf(Jobs_[I].Path);
    int Use = StemUses[Stem]++;
    if (Use > 0)
      Stem += "_" + std::to_string(Use);
    if (Format == "plist" || Format == "both")
      if (!writeFile(OutputDir + "/" + Stem + ".plist",
                     plistForReports(Visible))) {
        Err << "error: cannot write plist for " << Jobs_[I].Path << "\n";
        return 2;
      }
    if (!EmitSmtDir.empty()) {
      if (!ensureDir(EmitSmtDir)) {
        Err << "error: cannot create " << EmitSmtDir << "\n";
        return 2;
      }
      for (const auto &[Hash, Text] : O.SmtFiles)
        writeFile(EmitSmtDir + "/" + Hash + ".smt2", Text);
    }
  }
  Stats.bump("reports_emitted", EmittedReports);

  if (Format == "html" || Format == "both") {
    std::vector<BugReport> All;
    for (TuOutcome &O : Outcomes)
      for (BugReport &R : O.Reports)
        if (!R.Suppressed)
          All.push_back(R);
    writeFile(OutputDir + "/report.html", htmlForReports(All));
  }

  if (WriteCoverage) {
    ensureDir(OutputDir + "/coverage");
    for (const auto &[File, Exec] : Coverage.Executable) {
      auto SrcIt = SourceLines.find(File);
      if (SrcIt == SourceLines.end())
        continue;
      static const std::map<std::uint32_t, std::uint64_t> NoCounts;
      auto CntIt = Coverage.Lines.find(File);
      writeFile(OutputDir + "/coverage/" + baseNameOf(File) + ".gcov",
                gcovTextForFile(SrcIt->second,
                                CntIt == Coverage.Lines.end() ? NoCounts
                                                              : CntIt->second,
                                Exec));
    }
  }

  // Stats: a deterministic file, and STAT lines on demand.
  {
    std::ostringstream SS;
    for (const auto &[Name, Value] : Stats.Counters)
      SS << Name << " = " << Value << "\n";
    writeFile(OutputDir + "/stats.txt", SS.str());
  }
  if (PrintStats)
    for (const auto &[Name, Value] : Stats.Counters)
      Err << "STAT: " << Name << " = " << Value << "\n";

  return EmittedReports > 0 ? 1 : 0;
}

} // namespace minisa
