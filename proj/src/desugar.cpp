// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/desugar.hpp"

#include <map>
#include <set>

#include "overloaded.hpp"
#include "typestate/usage_lts.hpp"

namespace typestate {

namespace {

Diagnostic error(std::string kind, std::string rule, SourceSpan span, std::string message) {
  Diagnostic d;
  d.kind = std::move(kind);
  d.rule = std::move(rule);
  d.span = span;
  d.message = std::move(message);
  return d;
}

class Desugarer {
 public:
  Desugarer(const Program& program, std::vector<Diagnostic>& diags)
      : program_(program), diags_(diags) {}

  TypeAnnot resolve_type(const TypeAnnot& t, SourceSpan span) {
    if (t.kind != TypeAnnot::Kind::Named) return t;
    if (t.name != kMainClass && program_.find_class(t.name)) return TypeAnnot::class_type(t.name);
    if (program_.find_enum(t.name)) return TypeAnnot::enum_type(t.name);
    diags_.push_back(error("UnknownType", "desugar", span, "unknown type '" + t.name + "'"));
    return t;
  }

  ExprPtr body(const ClassDecl& cls, const std::string& param, const ExprPtr& e) {
    cls_ = &cls;
    param_ = param;
    labels_.clear();
    return resolve(e);
  }

 private:
  bool is_field(const std::string& name) const { return cls_->find_field(name) != nullptr; }

  void require_field(const std::string& name, SourceSpan span) {
    if (!is_field(name))
      diags_.push_back(error("UnknownField", "desugar", span,
                             "class " + cls_->name + " has no field '" + name + "'"));
  }

  Ref resolve_receiver(const Ref& r, SourceSpan span) {
    if (r.kind == Ref::Kind::Name) {
      if (r.name == param_) return Ref::param(r.name);
      if (is_field(r.name)) return Ref::this_field(r.name);
      diags_.push_back(error("UnknownIdentifier", "desugar", span,
                             "'" + r.name + "' is neither a field of " + cls_->name +
                                 " nor the parameter"));
      return r;
    }
    if (r.kind == Ref::Kind::This && r.field) require_field(*r.field, span);
    return r;
  }

  Ref resolve_target(const Ref& r, const std::string& field, SourceSpan span) {
    if (r.kind == Ref::Kind::Name && field == param_ && !is_field(field)) {
      diags_.push_back(error("InvalidAssignment", "desugar", span,
                             "cannot assign to parameter '" + field + "'"));
      return Ref::this_ref();
    }
    require_field(field, span);
    return Ref::this_ref();
  }

  std::string fresh_label(const std::string& base) {
    for (int i = 1;; ++i) {
      std::string candidate = base + "$" + std::to_string(i);
      if (!used_labels_.count(candidate)) {
        used_labels_.insert(candidate);
        return candidate;
      }
    }
  }

  ExprPtr resolve(const ExprPtr& e) {
    const SourceSpan span = e->span;
    Expr::Node node = std::visit(
        detail::Overloaded{
            [&](const Expr::Name& n) -> Expr::Node {
              if (n.name == param_) return Expr::Param{n.name};
              if (is_field(n.name)) return Expr::FieldRead{Ref::this_ref(), n.name};
              diags_.push_back(error("UnknownIdentifier", "desugar", span,
                                     "'" + n.name + "' is neither a field of " + cls_->name +
                                         " nor the parameter"));
              return n;
            },
            [&](const Expr::FieldRead& r) -> Expr::Node {
              require_field(r.field, span);
              return r;
            },
            [&](const Expr::FieldAssign& a) -> Expr::Node {
              Ref target = resolve_target(a.target, a.field, span);
              return Expr::FieldAssign{target, a.field, resolve(a.value)};
            },
            [&](const Expr::FieldAssignNew& a) -> Expr::Node {
              Ref target = resolve_target(a.target, a.field, span);
              if (a.class_name == kMainClass || !program_.find_class(a.class_name))
                diags_.push_back(error("UnknownClass", "desugar", span,
                                       "unknown class '" + a.class_name + "'"));
              return Expr::FieldAssignNew{target, a.field, a.class_name};
            },
            [&](const Expr::Call& c) -> Expr::Node {
              return Expr::Call{resolve_receiver(c.receiver, span), c.method, resolve(c.arg)};
            },
            [&](const Expr::Seq& s) -> Expr::Node {
              return Expr::Seq{resolve(s.first), resolve(s.second)};
            },
            [&](const Expr::If& i) -> Expr::Node {
              return Expr::If{resolve(i.cond), resolve(i.then_branch), resolve(i.else_branch)};
            },
            [&](const Expr::EnumLit& l) -> Expr::Node {
              const EnumDecl* decl = program_.enum_of_label(l.label);
              if (!decl) {
                diags_.push_back(error("UnknownLabel", "desugar", span,
                                       "no enum declares label '" + l.label + "'"));
                return l;
              }
              return Expr::EnumLit{Ref::this_ref(), decl->name, l.label};
            },
            [&](const Expr::Match& m) -> Expr::Node {
              Expr::Match out{resolve(m.scrutinee), {}};
              for (const auto& arm : m.arms) out.arms.push_back({arm.label, resolve(arm.body), arm.span});
              return out;
            },
            [&](const Expr::Labelled& l) -> Expr::Node {
              std::string name = l.label;
              auto previous = labels_.find(l.label);
              std::optional<std::string> saved;
              if (previous != labels_.end()) {
                saved = previous->second;
                name = fresh_label(l.label);
              }
              used_labels_.insert(name);
              labels_[l.label] = name;
              ExprPtr inner = resolve(l.body);
              if (saved) {
                labels_[l.label] = *saved;
              } else {
                labels_.erase(l.label);
              }
              return Expr::Labelled{name, inner};
            },
            [&](const Expr::Continue& c) -> Expr::Node {
              auto it = labels_.find(c.label);
              return Expr::Continue{it == labels_.end() ? c.label : it->second};
            },
            [&](const Expr::FloatMul& m) -> Expr::Node {
              return Expr::FloatMul{resolve(m.lhs), resolve(m.rhs)};
            },
            [&](const Expr::FloatAdd& a) -> Expr::Node {
              return Expr::FloatAdd{resolve(a.lhs), resolve(a.rhs)};
            },
            [&](const Expr::ObjRef& o) -> Expr::Node {
              diags_.push_back(error("InvalidReference", "desugar", span,
                                     "object references cannot appear in program text"));
              return o;
            },
            [&](const auto& leaf) -> Expr::Node { return leaf; },
        },
        e->node);
    return make_expr(std::move(node), span);
  }

  const Program& program_;
  std::vector<Diagnostic>& diags_;
  const ClassDecl* cls_ = nullptr;
  std::string param_;
  std::map<std::string, std::string> labels_;
  std::set<std::string> used_labels_;
};

constexpr const char* kUnusedParam = "_";

void check_usage_names(const UsagePtr& u, const ClassDecl& cls, std::vector<Diagnostic>& out) {
  auto check_arms = [&](const std::vector<Usage::Arm>& arms, const char* what) {
    std::set<std::string> seen;
    for (const auto& arm : arms) {
      if (!seen.insert(arm.name).second)
        out.push_back(error("DuplicateName", "validate", cls.span,
                            "usage of " + cls.name + " repeats " + what + " '" + arm.name + "'"));
    }
  };
  if (const auto* b = u->as<Usage::Branch>()) {
    check_arms(b->arms, "method");
    for (const auto& arm : b->arms) {
      if (!cls.find_method(arm.name))
        out.push_back(error("UnknownMethod", "validate", cls.span,
                            "usage of " + cls.name + " mentions undeclared method '" + arm.name +
                                "'"));
      check_usage_names(arm.next, cls, out);
    }
  } else if (const auto* c = u->as<Usage::Choice>()) {
    check_arms(c->arms, "label");
    for (const auto& arm : c->arms) check_usage_names(arm.next, cls, out);
  } else if (const auto* r = u->as<Usage::Rec>()) {
    check_usage_names(r->body, cls, out);
  }
}

void check_class(const ClassDecl& cls, std::vector<Diagnostic>& out) {
  if (!is_closed(cls.usage)) {
    out.push_back(error("OpenUsage", "validate", cls.span,
                        "usage of " + cls.name + " has free variables: " + render_usage(cls.usage)));
  } else if (!is_contractive(cls.usage)) {
    out.push_back(error("NonContractive", "validate", cls.span,
                        "usage of " + cls.name + " is not contractive"));
  }
  if (cls.usage->is<Usage::Choice>())
    out.push_back(error("InvalidUsage", "validate", cls.span,
                        "a choice may only follow a method in a branch"));
  check_usage_names(cls.usage, cls, out);

  std::set<std::string> fields;
  for (const auto& f : cls.fields) {
    if (!fields.insert(f.name).second)
      out.push_back(error("DuplicateName", "validate", f.span,
                          "field '" + f.name + "' declared twice in " + cls.name));
  }
  std::set<std::string> methods;
  for (const auto& m : cls.methods) {
    if (!methods.insert(m.name).second)
      out.push_back(error("DuplicateName", "validate", m.span,
                          "method '" + m.name + "' declared twice in " + cls.name));
  }
}

}  // namespace

Outcome<Program> desugar(const SurfaceProgram& surface) {
  Program program;
  std::vector<Diagnostic> diags;

  // Skeleton first so that type and label resolution can see every declaration.
  for (const auto& decl : surface.decls) {
    if (const auto* e = std::get_if<EnumDecl>(&decl)) {
      program.decls.emplace_back(*e);
    } else {
      const auto& c = std::get<SurfaceClass>(decl);
      ClassDecl cls;
      cls.name = c.name;
      cls.usage = c.usage;
      cls.fields = c.fields;
      cls.span = c.span;
      program.decls.emplace_back(std::move(cls));
    }
  }
  program.main.name = kMainClass;
  program.main.usage = usage_branch({{kMainMethod, usage_end()}});
  program.main.fields = surface.main.fields;
  program.main.span = surface.main.span;

  Desugarer d(program, diags);
  auto resolve_fields = [&](std::vector<FieldDecl>& fields) {
    for (auto& f : fields) f.type = d.resolve_type(f.type, f.span);
  };

  for (std::size_t i = 0; i < surface.decls.size(); ++i) {
    const auto* sc = std::get_if<SurfaceClass>(&surface.decls[i]);
    if (!sc) continue;
    auto& cls = std::get<ClassDecl>(program.decls[i]);
    resolve_fields(cls.fields);
    for (const auto& sm : sc->methods) {
      MethodDecl m;
      m.name = sm.name;
      m.span = sm.span;
      if (sm.param) {
        m.param_name = sm.param->name;
        m.param_type = d.resolve_type(sm.param->type, sm.span);
      } else {
        m.param_name = kUnusedParam;
        m.param_type = TypeAnnot::void_type();
      }
      m.return_type = sm.return_type ? d.resolve_type(*sm.return_type, sm.span)
                                     : TypeAnnot::void_type();
      cls.methods.push_back(std::move(m));
    }
    // Bodies are resolved against the finished class, fields included.
    for (std::size_t k = 0; k < sc->methods.size(); ++k) {
      cls.methods[k].body = d.body(cls, cls.methods[k].param_name, sc->methods[k].body);
    }
  }

  resolve_fields(program.main.fields);
  MethodDecl main_method;
  main_method.name = kMainMethod;
  main_method.param_name = kUnusedParam;
  main_method.param_type = TypeAnnot::void_type();
  main_method.return_type = TypeAnnot::void_type();
  main_method.span = surface.main.span;
  program.main.methods.push_back(std::move(main_method));
  program.main.methods[0].body = d.body(program.main, kUnusedParam, surface.main.body);

  if (!diags.empty()) return Outcome<Program>::failure(std::move(diags));
  return Outcome<Program>::success(std::move(program));
}

std::vector<Diagnostic> validate_program(const Program& program) {
  std::vector<Diagnostic> out;
  std::set<std::string> names{kMainClass};
  std::map<std::string, std::string> label_owner;
  for (const auto& decl : program.decls) {
    std::visit(detail::Overloaded{
                   [&](const ClassDecl& c) {
                     if (!names.insert(c.name).second)
                       out.push_back(error("DuplicateName", "validate", c.span,
                                           "type name '" + c.name + "' declared twice"));
                     check_class(c, out);
                   },
                   [&](const EnumDecl& e) {
                     if (!names.insert(e.name).second)
                       out.push_back(error("DuplicateName", "validate", e.span,
                                           "type name '" + e.name + "' declared twice"));
                     if (e.labels.empty())
                       out.push_back(error("InvalidEnum", "validate", e.span,
                                           "enum " + e.name + " has no labels"));
                     for (const auto& l : e.labels) {
                       auto [it, fresh] = label_owner.emplace(l, e.name);
                       if (!fresh)
                         out.push_back(error("DuplicateName", "validate", e.span,
                                             "label '" + l + "' already declared by enum " +
                                                 it->second));
                     }
                   },
               },
               decl);
  }
  check_class(program.main, out);
  return out;
}

}  // namespace typestate
