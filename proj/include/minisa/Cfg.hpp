//===--- Cfg.hpp - Per-function control flow graphs ------------*- C++ -*-===//
//
// Part of MiniSA, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0
//
//===----------------------------------------------------------------------===//
//
// Basic blocks keep whole statements in program order; the engine walks
// sub-expressions itself. `&&`, `||` and `!` in branch conditions are lowered
// into chains of two-way branch blocks, so every Branch terminator condition
// is a primitive scalar expression. `while` produces a dedicated loop-head
// block that is the target of the back edge.
//
//===----------------------------------------------------------------------===//

#pragma once

#include "minisa/Ast.hpp"

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace minisa {

struct CfgTerminator {
  enum class Kind { Goto, Branch, Return, NoReturn };
  Kind K = Kind::Goto;
  const Expr *Cond = nullptr;           // Branch
  const Stmt *ReturnStmt = nullptr;     // Return
  std::uint32_t Succs[2] = {0, 0};      // Branch: [0]=true, [1]=false
  std::uint32_t succCount() const { return K == Kind::Branch ? 2 : 1; }
};

struct CfgBlock {
  std::uint32_t Id = 0;
  std::vector<const Stmt *> Stmts;
  CfgTerminator Term;
  std::vector<std::uint32_t> Preds;
  bool IsLoopHead = false;
  const Stmt *LoopStmt = nullptr;      // the `while` this block heads
  const Stmt *EnclosingLoop = nullptr; // innermost `while` containing it

  // Variables referenced in this block or any block reachable from it;
  // the engine's dead-binding sweep treats everything else as dead here.
  std::set<const VarDecl *> LiveVars;
};

struct Cfg {
  const FunctionDecl *Fn = nullptr;
  std::vector<CfgBlock> Blocks;
  std::uint32_t Entry = 0;
  std::uint32_t Exit = 1;
  std::set<const VarDecl *> AddrTaken;

  const CfgBlock &block(std::uint32_t Id) const { return Blocks[Id]; }
  std::size_t size() const { return Blocks.size(); }
};

std::unique_ptr<Cfg> buildCfg(const FunctionDecl &Fn, Ast &Unit);

/// One block per line: `B<id>: [stmts] -> succs`.
std::string dumpCfg(const Cfg &G);

} // namespace minisa
