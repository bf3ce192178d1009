// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace typestate {

struct Usage;
using UsagePtr = std::shared_ptr<const Usage>;

/// Protocol terms: `{m; w}` branches, `<l: U>` choices, `rec X.U`, `X`, `end`.
/// Choices only occur as the continuation of a branch arm.
struct Usage {
  struct Arm {
    std::string name;
    UsagePtr next;
  };
  struct Branch {
    std::vector<Arm> arms;
  };
  struct Choice {
    std::vector<Arm> arms;
  };
  struct Rec {
    std::string var;
    UsagePtr body;
  };
  struct Var {
    std::string name;
  };
  struct End {};

  using Node = std::variant<Branch, Choice, Rec, Var, End>;
  Node node;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

UsagePtr usage_end();
UsagePtr usage_var(std::string name);
UsagePtr usage_rec(std::string var, UsagePtr body);
UsagePtr usage_branch(std::vector<Usage::Arm> arms);
UsagePtr usage_choice(std::vector<Usage::Arm> arms);

/// Syntactic equality (variable names compared literally).
bool structurally_equal(const UsagePtr& a, const UsagePtr& b);

/// Notation: `{m; w, n; w}`, `<l: U, l': U>`, `rec X.U`, `X`, `end`.
/// The output re-parses with `parse_usage`.
std::string render_usage(const UsagePtr& u);

/// Names of usage variables not bound by an enclosing `rec`.
std::vector<std::string> free_usage_vars(const UsagePtr& u);
bool is_closed(const UsagePtr& u);

/// False if some chain of `rec` binders ends directly in one of its own
/// variables (`rec X.X`, `rec X.rec Y.X`); unfolding such a term never
/// reaches a branch, choice or end.
bool is_contractive(const UsagePtr& u);

/// Capture-avoiding substitution of `replacement` for free `var`.
/// `replacement` is expected to be closed, so no renaming is needed.
UsagePtr substitute_usage(const UsagePtr& u, const std::string& var,
                          const UsagePtr& replacement);

}  // namespace typestate
