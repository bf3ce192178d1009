// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/ast.hpp"

#include <algorithm>
#include <functional>

#include "ast_rewrite.hpp"
#include "overloaded.hpp"

namespace typestate {

using detail::Overloaded;

std::string to_string(ObjectId id) { return "o" + std::to_string(id.value); }

std::string render_type(const TypeAnnot& t) {
  switch (t.kind) {
    case TypeAnnot::Kind::Void:
      return "void";
    case TypeAnnot::Kind::Bool:
      return "bool";
    case TypeAnnot::Kind::Float:
      return "float";
    default:
      return t.name;
  }
}

ExprPtr make_expr(Expr::Node node, SourceSpan span) {
  return std::make_shared<const Expr>(Expr{std::move(node), span});
}

bool is_value(const Expr& e) {
  if (e.is<Expr::Unit>() || e.is<Expr::Null>() || e.is<Expr::BoolLit>() ||
      e.is<Expr::FloatLit>() || e.is<Expr::ObjRef>() || e.is<Expr::Placeholder>())
    return true;
  if (const auto* lit = e.as<Expr::EnumLit>()) return lit->owner.kind == Ref::Kind::Object;
  return false;
}

const FieldDecl* ClassDecl::find_field(const std::string& f) const {
  auto it = std::find_if(fields.begin(), fields.end(), [&](const auto& d) { return d.name == f; });
  return it == fields.end() ? nullptr : &*it;
}

const MethodDecl* ClassDecl::find_method(const std::string& m) const {
  auto it =
      std::find_if(methods.begin(), methods.end(), [&](const auto& d) { return d.name == m; });
  return it == methods.end() ? nullptr : &*it;
}

bool EnumDecl::has_label(const std::string& l) const {
  return std::find(labels.begin(), labels.end(), l) != labels.end();
}

const ClassDecl* Program::find_class(const std::string& name) const {
  if (name == main.name) return &main;
  for (const auto& d : decls) {
    if (const auto* c = std::get_if<ClassDecl>(&d); c && c->name == name) return c;
  }
  return nullptr;
}

const EnumDecl* Program::find_enum(const std::string& name) const {
  for (const auto& d : decls) {
    if (const auto* e = std::get_if<EnumDecl>(&d); e && e->name == name) return e;
  }
  return nullptr;
}

const EnumDecl* Program::enum_of_label(const std::string& label) const {
  for (const auto& d : decls) {
    if (const auto* e = std::get_if<EnumDecl>(&d); e && e->has_label(label)) return e;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------

namespace detail {

ExprPtr Rewriter::apply(const ExprPtr& e) {
  if (auto replaced = rewrite(e)) return *replaced;
  auto sub = [&](const ExprPtr& child) { return child ? apply(child) : child; };
  Expr::Node node = std::visit(
      Overloaded{
          [&](const Expr::FieldAssign& n) -> Expr::Node {
            return Expr::FieldAssign{rewrite_ref(n.target), n.field, sub(n.value)};
          },
          [&](const Expr::FieldAssignNew& n) -> Expr::Node {
            return Expr::FieldAssignNew{rewrite_ref(n.target), n.field, n.class_name};
          },
          [&](const Expr::Seq& n) -> Expr::Node { return Expr::Seq{sub(n.first), sub(n.second)}; },
          [&](const Expr::Call& n) -> Expr::Node {
            return Expr::Call{rewrite_ref(n.receiver), n.method, sub(n.arg)};
          },
          [&](const Expr::FieldRead& n) -> Expr::Node {
            return Expr::FieldRead{rewrite_ref(n.target), n.field};
          },
          [&](const Expr::If& n) -> Expr::Node {
            return Expr::If{sub(n.cond), sub(n.then_branch), sub(n.else_branch)};
          },
          [&](const Expr::EnumLit& n) -> Expr::Node {
            return Expr::EnumLit{rewrite_ref(n.owner), n.enum_name, n.label};
          },
          [&](const Expr::Match& n) -> Expr::Node {
            Expr::Match m{sub(n.scrutinee), {}};
            m.arms.reserve(n.arms.size());
            for (const auto& arm : n.arms) m.arms.push_back({arm.label, sub(arm.body), arm.span});
            return m;
          },
          [&](const Expr::Labelled& n) -> Expr::Node {
            if (!enter_labelled(n.label)) return n;
            return Expr::Labelled{n.label, sub(n.body)};
          },
          [&](const Expr::FloatMul& n) -> Expr::Node {
            return Expr::FloatMul{sub(n.lhs), sub(n.rhs)};
          },
          [&](const Expr::FloatAdd& n) -> Expr::Node {
            return Expr::FloatAdd{sub(n.lhs), sub(n.rhs)};
          },
          [&](const auto& leaf) -> Expr::Node { return leaf; },
      },
      e->node);
  return make_expr(std::move(node), e->span);
}

void visit_preorder(const ExprPtr& e, const std::function<void(const Expr&)>& fn) {
  if (!e) return;
  fn(*e);
  std::visit(Overloaded{
                 [&](const Expr::FieldAssign& n) { visit_preorder(n.value, fn); },
                 [&](const Expr::Seq& n) {
                   visit_preorder(n.first, fn);
                   visit_preorder(n.second, fn);
                 },
                 [&](const Expr::Call& n) { visit_preorder(n.arg, fn); },
                 [&](const Expr::If& n) {
                   visit_preorder(n.cond, fn);
                   visit_preorder(n.then_branch, fn);
                   visit_preorder(n.else_branch, fn);
                 },
                 [&](const Expr::Match& n) {
                   visit_preorder(n.scrutinee, fn);
                   for (const auto& arm : n.arms) visit_preorder(arm.body, fn);
                 },
                 [&](const Expr::Labelled& n) { visit_preorder(n.body, fn); },
                 [&](const Expr::FloatMul& n) {
                   visit_preorder(n.lhs, fn);
                   visit_preorder(n.rhs, fn);
                 },
                 [&](const Expr::FloatAdd& n) {
                   visit_preorder(n.lhs, fn);
                   visit_preorder(n.rhs, fn);
                 },
                 [&](const auto&) {},
             },
             e->node);
}

}  // namespace detail

namespace {

class ThisSubstitution : public detail::Rewriter {
 public:
  explicit ThisSubstitution(ObjectId o) : object_(o) {}

  Ref rewrite_ref(const Ref& r) override {
    if (r.kind != Ref::Kind::This) return r;
    return Ref::object_ref(object_, r.field);
  }

 private:
  ObjectId object_;
};

class ParamSubstitution : public detail::Rewriter {
 public:
  explicit ParamSubstitution(ExprPtr value) : value_(std::move(value)) {}

  std::optional<ExprPtr> rewrite(const ExprPtr& e) override {
    if (e->is<Expr::Param>()) return value_;
    return std::nullopt;
  }

  Ref rewrite_ref(const Ref& r) override {
    if (r.kind != Ref::Kind::Param) return r;
    if (const auto* obj = value_->as<Expr::ObjRef>()) return Ref::object_ref(obj->object, r.field);
    Ref out;
    out.kind = Ref::Kind::Value;
    out.name = r.name;
    out.field = r.field;
    out.value = value_;
    return out;
  }

 private:
  ExprPtr value_;
};

class ContinueSubstitution : public detail::Rewriter {
 public:
  ContinueSubstitution(std::string label, ExprPtr loop)
      : label_(std::move(label)), loop_(std::move(loop)) {}

  std::optional<ExprPtr> rewrite(const ExprPtr& e) override {
    if (const auto* c = e->as<Expr::Continue>(); c && c->label == label_) return loop_;
    return std::nullopt;
  }

  bool enter_labelled(const std::string& label) override { return label != label_; }

 private:
  std::string label_;
  ExprPtr loop_;
};

}  // namespace

ExprPtr substitute_this(const ExprPtr& e, ObjectId o) { return ThisSubstitution(o).apply(e); }

ExprPtr substitute_param(const ExprPtr& e, const ExprPtr& value) {
  return ParamSubstitution(value).apply(e);
}

ExprPtr substitute_continue(const ExprPtr& e, const std::string& label, const ExprPtr& loop) {
  return ContinueSubstitution(label, loop).apply(e);
}

bool contains_object_reference(const ExprPtr& e) {
  bool found = false;
  auto check_ref = [&](const Ref& r) {
    if (r.kind == Ref::Kind::Object) found = true;
  };
  detail::visit_preorder(e, [&](const Expr& n) {
    std::visit(Overloaded{
                   [&](const Expr::ObjRef&) { found = true; },
                   [&](const Expr::FieldAssign& x) { check_ref(x.target); },
                   [&](const Expr::FieldAssignNew& x) { check_ref(x.target); },
                   [&](const Expr::Call& x) { check_ref(x.receiver); },
                   [&](const Expr::FieldRead& x) { check_ref(x.target); },
                   [&](const Expr::EnumLit& x) { check_ref(x.owner); },
                   [&](const auto&) {},
               },
               n.node);
  });
  return found;
}

}  // namespace typestate
