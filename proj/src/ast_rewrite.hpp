// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <optional>

#include "typestate/ast.hpp"

namespace typestate::detail {

/// Bottom-up rebuild of an expression tree. `rewrite` may replace a node
/// wholesale (its children are then not visited); `rewrite_ref` maps every
/// call receiver, field target and enum owner.
class Rewriter {
 public:
  virtual ~Rewriter() = default;

  ExprPtr apply(const ExprPtr& e);

 protected:
  virtual std::optional<ExprPtr> rewrite(const ExprPtr&) { return std::nullopt; }
  virtual Ref rewrite_ref(const Ref& r) { return r; }
  virtual bool enter_labelled(const std::string&) { return true; }
};

void visit_preorder(const ExprPtr& e, const std::function<void(const Expr&)>& fn);

}  // namespace typestate::detail
