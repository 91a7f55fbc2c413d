//===--- Ctu.cpp - Cross translation unit analysis support --------------------===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//

#include "minisa/Ctu.hpp"
#include "minisa/Support/Io.hpp"
#include "minisa/Usr.hpp"

#include <functional>
#include <map>
#include <sstream>

namespace minisa {

std::string CtuIndex::toText() const {
  std::ostringstream OS;
  for (const auto &[Usr, Path] : DefinitionPaths)
    OS << Usr << " " << Path << "\n";
  return OS.str();
}

std::optional<CtuIndex> CtuIndex::fromText(const std::string &Text) {
  CtuIndex Index;
  std::istringstream IS(Text);
  std::string Line;
  while (std::getline(IS, Line)) {
    if (Line.empty())
      continue;
    std::size_t Space = Line.find(' ');
    if (Space == std::string::npos || Space == 0 || Space + 1 >= Line.size())
      return std::nullopt;
    Index.DefinitionPaths.emplace(Line.substr(0, Space),
                                  Line.substr(Space + 1));
  }
  return Index;
}

CtuPass1Result ctuPass1(
    const std::vector<std::pair<std::string, std::string>> &Units,
    const std::string &Dir) {
  CtuPass1Result Result;
  Result.Dir = Dir;
  if (!ensureDir(Dir) || !ensureDir(Dir + "/asts")) {
    Result.Errors.push_back("cannot create CTU directory " + Dir);
    return Result;
  }

  CtuIndex Index;
  std::map<std::string, std::string> BodyFingerprints;   // fn usr -> bytes
  std::map<std::string, std::string> BodyOrigin;         // fn usr -> file
  std::map<std::string, std::string> RecordFingerprints; // rec usr -> layout
  std::map<std::string, std::string> RecordOrigin;
  std::map<std::string, int> StemUses;

  for (const auto &[Path, Source] : Units) {
    ParseResult PR = parseTranslationUnit(Source, Path);
    if (!PR.ok()) {
      for (const Diagnostic &D : PR.Diags)
        Result.Errors.push_back(Path + ":" + std::to_string(D.Loc.Line) + ":" +
                                std::to_string(D.Loc.Col) + ": " + D.Message);
      continue;
    }

    std::string Stem = stemOf(Path);
    int Use = StemUses[Stem]++;
    if (Use > 0)
      Stem += "_" + std::to_string(Use);
    std::string RelPath = "asts/" + Stem + ".ast";
    if (!writeFile(Dir + "/" + RelPath, serializeAst(*PR.Unit))) {
      Result.Errors.push_back("cannot write " + Dir + "/" + RelPath);
      continue;
    }

    for (const RecordDecl *R : PR.Unit->Records) {
      std::string FP = fingerprintRecord(*R);
      auto [It, Inserted] = RecordFingerprints.emplace(R->Usr, FP);
      if (Inserted) {
        RecordOrigin[R->Usr] = Path;
      } else if (It->second != FP) {
        Result.Errors.push_back("OdrViolation: " + R->Usr +
                                " has different layouts in " +
                                RecordOrigin[R->Usr] + " and " + Path);
      }
    }

    for (const FunctionDecl *F : PR.Unit->Functions) {
      if (!F->hasBody() || F->Builtin)
        continue;
      std::string FP = fingerprintFunction(*F, *PR.Unit);
      auto [It, Inserted] = BodyFingerprints.emplace(F->Usr, FP);
      if (Inserted) {
        BodyOrigin[F->Usr] = Path;
        Index.DefinitionPaths[F->Usr] = RelPath;
      } else if (It->second != FP) {
        Result.Errors.push_back("IndexConflict: " + F->Usr +
                                " defined differently in " +
                                BodyOrigin[F->Usr] + " and " + Path);
      }
      // Byte-identical redefinitions collapse onto the first file.
    }
  }

  if (!writeFile(Dir + "/index.txt", Index.toText()))
    Result.Errors.push_back("cannot write " + Dir + "/index.txt");
  return Result;
}

//===----------------------------------------------------------------------===//
// Importing definitions across units
//===----------------------------------------------------------------------===//

namespace {

class Importer {
public:
  Importer(const Ast &Src, Ast &Dest) : Src(Src), Dest(Dest) {}

  const Ast &Src;
  Ast &Dest;
  std::string Error;
  std::map<const VarDecl *, VarDecl *> VarMap;
  std::map<std::uint32_t, std::uint32_t> FileMap;

  SourceLoc mapLoc(SourceLoc L) {
    auto It = FileMap.find(L.File);
    if (It == FileMap.end()) {
      std::string Name =
          L.File < Src.Files.size() ? Src.Files[L.File] : "<unknown>";
      It = FileMap.emplace(L.File, Dest.fileIndex(Name)).first;
    }
    return {It->second, L.Line, L.Col};
  }

  const Type *mapType(const Type *T) {
    if (!T)
      return nullptr;
    switch (T->Kind) {
    case TypeKind::Int:
      return Dest.intType();
    case TypeKind::Void:
      return Dest.voidType();
    case TypeKind::Pointer:
      return Dest.pointerTo(mapType(T->Pointee));
    case TypeKind::Array:
      return Dest.arrayOf(mapType(T->Element), T->Length);
    case TypeKind::Record: {
      const RecordDecl *R = importRecord(T->Record);
      if (!R)
        return nullptr;
      return Dest.recordType(T->RecordName, R);
    }
    }
    return nullptr;
  }

  const RecordDecl *importRecord(const RecordDecl *R) {
    if (!R) {
      Error = "record reference without definition";
      return nullptr;
    }
    if (RecordDecl *Existing = Dest.findRecord(R->Name)) {
      if (fingerprintRecord(*Existing) != fingerprintRecord(*R)) {
        Error = "OdrViolation: " + R->Usr + " layout mismatch on import";
        return nullptr;
      }
      return Existing;
    }
    RecordDecl *Copy = Dest.newRecord();
    Copy->Name = R->Name;
    Copy->Usr = R->Usr;
    Copy->Loc = mapLoc(R->Loc);
    Dest.Records.push_back(Copy);
    for (const FieldDecl &F : R->Fields) {
      FieldDecl FC;
      FC.Name = F.Name;
      FC.Index = F.Index;
      FC.Loc = mapLoc(F.Loc);
      FC.Ty = mapType(F.Ty);
      if (!FC.Ty)
        return nullptr;
      Copy->Fields.push_back(FC);
    }
    return Copy;
  }

  VarDecl *importGlobal(const VarDecl *G) {
    if (VarDecl *Existing = Dest.findGlobal(G->Name)) {
      if (typeName(Existing->Ty) != typeName(G->Ty)) {
        Error = "global '" + G->Name + "' has mismatched types across units";
        return nullptr;
      }
      return Existing;
    }
    VarDecl *Copy = Dest.newVar();
    Copy->Name = G->Name;
    Copy->Ty = mapType(G->Ty);
    Copy->IsGlobal = true;
    Copy->Loc = mapLoc(G->Loc);
    Dest.Globals.push_back(Copy);
    return Copy;
  }

  VarDecl *mapVar(const VarDecl *V) {
    if (V->IsGlobal)
      return importGlobal(V);
    auto It = VarMap.find(V);
    if (It != VarMap.end())
      return It->second;
    VarDecl *Copy = Dest.newVar();
    Copy->Name = V->Name;
    Copy->Ty = mapType(V->Ty);
    Copy->IsParam = V->IsParam;
    Copy->Loc = mapLoc(V->Loc);
    VarMap.emplace(V, Copy);
    return Copy;
  }

  /// A callee referenced by the imported body: reuse the destination
  /// declaration when present, otherwise add a body-less declaration that the
  /// engine can later resolve through the index again.
  const FunctionDecl *importCalleeDecl(const FunctionDecl *F) {
    if (FunctionDecl *Existing = Dest.findFunction(F->Name)) {
      if (Existing->Usr != F->Usr) {
        Error = "function '" + F->Name + "' has mismatched signatures";
        return nullptr;
      }
      return Existing;
    }
    FunctionDecl *Decl = Dest.newFunction();
    Decl->Name = F->Name;
    Decl->Usr = F->Usr;
    Decl->ReturnTy = mapType(F->ReturnTy);
    Decl->Loc = mapLoc(F->Loc);
    Decl->NoReturn = F->NoReturn;
    Decl->Builtin = F->Builtin;
    Decl->Imported = true;
    for (const VarDecl *P : F->Params) {
      VarDecl *PC = Dest.newVar();
      PC->Name = P->Name;
      PC->Ty = mapType(P->Ty);
      PC->IsParam = true;
      PC->Loc = mapLoc(P->Loc);
      Decl->Params.push_back(PC);
    }
    Dest.Functions.push_back(Decl);
    return Decl;
  }

  Expr *mapExpr(const Expr *E) {
    if (!E)
      return nullptr;
    Expr *C = Dest.newExpr(E->Kind, mapLoc(E->Loc));
    C->Ty = mapType(E->Ty);
    C->IntValue = E->IntValue;
    C->UOp = E->UOp;
    C->BOp = E->BOp;
    C->Name = E->Name;
    C->Arrow = E->Arrow;
    if (E->Ref)
      C->Ref = mapVar(E->Ref);
    C->Lhs = mapExpr(E->Lhs);
    C->Rhs = mapExpr(E->Rhs);
    C->Operand = mapExpr(E->Operand);
    C->Base = mapExpr(E->Base);
    C->IndexExpr = mapExpr(E->IndexExpr);
    for (const Expr *A : E->Args)
      C->Args.push_back(mapExpr(A));
    if (E->Kind == ExprKind::Member && E->Field && C->Base && C->Base->Ty) {
      const Type *RecTy = E->Arrow ? C->Base->Ty->Pointee : C->Base->Ty;
      if (RecTy && RecTy->Record)
        C->Field = RecTy->Record->findField(E->Name);
    }
    if (E->Kind == ExprKind::Call && E->Callee)
      C->Callee = importCalleeDecl(E->Callee);
    return C;
  }

  Stmt *mapStmt(const Stmt *S) {
    if (!S)
      return nullptr;
    Stmt *C = Dest.newStmt(S->Kind, mapLoc(S->Loc));
    for (const Stmt *Child : S->Body)
      C->Body.push_back(mapStmt(Child));
    C->Cond = mapExpr(S->Cond);
    C->Then = mapStmt(S->Then);
    C->Else = mapStmt(S->Else);
    C->LoopBody = mapStmt(S->LoopBody);
    C->Value = mapExpr(S->Value);
    if (S->Var) {
      C->Var = mapVar(S->Var);
      C->Var->Init = mapExpr(S->Var->Init);
    }
    return C;
  }
};

} // namespace

const FunctionDecl *importFunction(const FunctionDecl &F, const Ast &Src,
                                   Ast &Dest, std::string *ErrorOut) {
  Importer Imp(Src, Dest);

  // Attach the body to the existing declaration when one is present, so call
  // expressions already resolved against it see the definition.
  FunctionDecl *Target = Dest.findFunction(F.Name);
  if (Target && Target->Usr != F.Usr) {
    if (ErrorOut)
      *ErrorOut = "signature mismatch importing '" + F.Name + "'";
    return nullptr;
  }
  if (Target && Target->hasBody())
    return Target;
  if (!Target) {
    Target = Dest.newFunction();
    Target->Name = F.Name;
    Target->Usr = F.Usr;
    Target->ReturnTy = Imp.mapType(F.ReturnTy);
    Dest.Functions.push_back(Target);
  }
  Target->Imported = true;
  Target->Loc = Imp.mapLoc(F.Loc);
  Target->NoReturn = F.NoReturn;

  std::vector<VarDecl *> Params;
  for (const VarDecl *P : F.Params)
    Params.push_back(Imp.mapVar(P));
  Stmt *Body = Imp.mapStmt(F.Body);
  if (!Imp.Error.empty()) {
    if (ErrorOut)
      *ErrorOut = Imp.Error;
    return nullptr;
  }
  Target->Params = std::move(Params);
  Target->Body = Body;
  return Target;
}

//===----------------------------------------------------------------------===//
// CtuContext
//===----------------------------------------------------------------------===//

const Ast *CtuContext::loadFile(const std::string &RelPath, RunStats &Stats) {
  auto It = LoadedFiles.find(RelPath);
  if (It != LoadedFiles.end())
    return It->second.get();
  std::optional<std::string> Bytes = readFile(Dir + "/" + RelPath);
  if (!Bytes) {
    Stats.bump("ctu_load_errors");
    LoadedFiles.emplace(RelPath, nullptr);
    return nullptr;
  }
  DeserializeResult DR = deserializeAst(*Bytes);
  Stats.bump("ctu_ast_loads");
  if (!DR.ok()) {
    Stats.bump("ctu_load_errors");
    LoadedFiles.emplace(RelPath, nullptr);
    return nullptr;
  }
  const Ast *Ptr = DR.Unit.get();
  LoadedFiles.emplace(RelPath, std::move(DR.Unit));
  return Ptr;
}

const FunctionDecl *CtuContext::loadExternalDefinition(const std::string &Usr,
                                                       Ast &Unit,
                                                       RunStats &Stats) {
  auto Cached = ImportedByUsr.find(Usr);
  if (Cached != ImportedByUsr.end())
    return Cached->second;
  if (FailedUsrs.count(Usr))
    return nullptr;

  if (!Index && !IndexLoadFailed) {
    std::optional<std::string> Text = readFile(Dir + "/index.txt");
    if (Text)
      Index = CtuIndex::fromText(*Text);
    if (!Index) {
      IndexLoadFailed = true;
      Stats.bump("ctu_load_errors");
    }
  }
  auto fail = [&]() -> const FunctionDecl * {
    FailedUsrs[Usr] = true;
    return nullptr;
  };
  if (!Index)
    return fail();

  auto Found = Index->DefinitionPaths.find(Usr);
  if (Found == Index->DefinitionPaths.end()) {
    Stats.bump("ctu_index_misses");
    return fail();
  }
  const Ast *Src = loadFile(Found->second, Stats);
  if (!Src)
    return fail();

  const FunctionDecl *Def = nullptr;
  for (const FunctionDecl *F : Src->Functions)
    if (F->Usr == Usr && F->hasBody())
      Def = F;
  if (!Def)
    return fail();

  std::string Error;
  const FunctionDecl *Imported = importFunction(*Def, *Src, Unit, &Error);
  if (!Imported) {
    Stats.bump("ctu_import_errors");
    return fail();
  }
  Stats.bump("ctu_defs_imported");
  ImportedByUsr.emplace(Usr, Imported);
  return Imported;
}

} // namespace minisa
