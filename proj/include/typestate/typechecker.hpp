// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"
#include "typestate/type_env.hpp"

namespace typestate {

/// Theta: environments installed when a method body was expanded.
using RecEnv = std::map<std::pair<ObjectId, std::string>, TypeEnv>;
/// Omega: environments at loop entry.
using LabelEnv = std::map<std::string, TypeEnv>;

/// Done(T, Gamma') or Pending. Pending comes from `continue` and from
/// recursive base cases; it adopts the type and environment of the sibling
/// branch at the enclosing if/match.
struct CheckResult {
  bool pending = false;
  ValueType type;
  TypeEnv env;

  static CheckResult done(ValueType t, TypeEnv g) { return {false, std::move(t), std::move(g)}; }
  static CheckResult pending_result() { return {true, {}, {}}; }
};

/// One applied typing rule. The 19 rules of the calculus use their usual
/// names (`Call-ind-rec`, `Case`, ...); float literals and arithmetic record
/// `Float` and `Float-op`, unknown base-typed arguments `Placeholder`.
struct RuleEvent {
  std::string rule;
  SourceSpan span;
  std::uint64_t env_hash = 0;
};

/// The 19 typing rules, in figure order.
const std::vector<std::string>& typing_rule_names();

struct CallSite {
  SourceSpan span;
  ObjectId object;
  std::string method;

  bool operator<(const CallSite& o) const {
    return std::tie(span.file, span.begin, span.end, object, method) <
           std::tie(o.span.file, o.span.begin, o.span.end, o.object, o.method);
  }
};

struct CheckStats {
  /// Method-body expansions (Call-d / Call-ind) per call site and receiver.
  std::map<CallSite, std::size_t> expansions;
  /// Recursive base cases taken (Call-d-rec / Call-ind-rec).
  std::size_t base_cases = 0;
  /// Theta bindings dropped through CheckOptions::forget_snapshot_at.
  std::size_t forgotten = 0;
};

struct CheckOptions {
  bool trace = false;
  /// Test hook: at the N-th (1-based) recursive base case, drop the Theta
  /// binding and expand the body again instead.
  std::optional<std::size_t> forget_snapshot_at;
};

struct CheckReport {
  ValueType type;
  TypeEnv final_env;
  std::vector<RuleEvent> trace;
  CheckStats stats;
};

/// `{o0 ↦ (Main[end], inittypes(Main fields))}`.
TypeEnv initial_env(const Program& program);

/// The reference of the Main object.
inline constexpr ObjectId kMainObject{0};

/// The (Main) rule: checks the main body from initial_env with empty Theta
/// and Omega and requires term of the final environment. Rejections carry
/// one diagnostic, or one UnfinishedProtocol diagnostic per unfinished object.
Outcome<CheckReport> check_program(const Program& program, const CheckOptions& options = {});

/// One judgment `Theta; Omega; Gamma |- e : T -| Gamma'` on a run-time
/// expression (no `this`, no parameters). `link_hint` types an enum
/// literal in tail position as `L link o` instead of `L`.
struct ExprCheck {
  CheckResult result;
  std::vector<RuleEvent> trace;
  CheckStats stats;
};
Outcome<ExprCheck> check_expr(const Program& program, const RecEnv& theta, const LabelEnv& omega,
                              const TypeEnv& env, const ExprPtr& e, bool link_hint = false,
                              const CheckOptions& options = {});

/// Human-readable explanation of a checker diagnostic: the rule, the
/// object and its usage, and what was attempted.
std::string explain(const Diagnostic& diag);

}  // namespace typestate
