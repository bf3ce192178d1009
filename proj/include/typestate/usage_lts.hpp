// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>

#include "typestate/usage.hpp"

namespace typestate {

/// A transition label of the usage LTS: a method call `m` or a choice label `l`.
struct UsageAction {
  enum class Kind { Method, Label };
  Kind kind = Kind::Method;
  std::string name;

  static UsageAction method(std::string m) { return {Kind::Method, std::move(m)}; }
  static UsageAction label(std::string l) { return {Kind::Label, std::move(l)}; }

  auto operator<=>(const UsageAction&) const = default;
};

std::string to_string(const UsageAction& a);

/// One transition `u --a--> u'`, or nullopt when `u` offers no `a`.
/// Stepping a method whose continuation is a choice yields the choice itself.
/// Throws TypestateError("OpenUsage") on usages with free variables.
std::optional<UsagePtr> usage_step(const UsagePtr& u, const UsageAction& a);

/// The actions `a` for which `usage_step(u, a)` is defined.
std::set<UsageAction> available(const UsagePtr& u);

/// One unfolding: `rec X.U` becomes `U[X := rec X.U]`; other terms are
/// returned unchanged. Throws TypestateError("NonContractive") for `rec X.X`.
UsagePtr unfold(const UsagePtr& u);

/// Unfolds until the head is a branch, choice or end.
UsagePtr unfold_head(const UsagePtr& u);

/// Strong bisimilarity of the two (finite-state) usage LTSs.
bool bisimilar(const UsagePtr& a, const UsagePtr& b);

/// No transitions after unfolding; equivalently bisimilar to `end`.
bool terminated(const UsagePtr& u);

}  // namespace typestate
