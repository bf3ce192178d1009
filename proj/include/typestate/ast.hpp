// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "typestate/source.hpp"
#include "typestate/usage.hpp"

namespace typestate {

/// Opaque object reference. Allocation is deterministic: a fresh reference is
/// one past the largest reference in use, so the checker and the interpreter
/// name objects identically.
struct ObjectId {
  std::uint32_t value = 0;
  auto operator<=>(const ObjectId&) const = default;
};

std::string to_string(ObjectId id);

/// Declared types `C | L | void | bool | float`. The parser cannot tell class
/// and enum names apart, so it emits `Named` and desugaring resolves it.
struct TypeAnnot {
  enum class Kind { Void, Bool, Float, Class, Enum, Named };
  Kind kind = Kind::Void;
  std::string name;

  static TypeAnnot void_type() { return {Kind::Void, {}}; }
  static TypeAnnot bool_type() { return {Kind::Bool, {}}; }
  static TypeAnnot float_type() { return {Kind::Float, {}}; }
  static TypeAnnot class_type(std::string n) { return {Kind::Class, std::move(n)}; }
  static TypeAnnot enum_type(std::string n) { return {Kind::Enum, std::move(n)}; }
  static TypeAnnot named(std::string n) { return {Kind::Named, std::move(n)}; }

  bool operator==(const TypeAnnot&) const = default;
};

std::string render_type(const TypeAnnot& t);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Targets of calls, field reads and assignments.
///   This / Object     `this`, or a concrete reference `o` at run time
///   Param             the method parameter `x`
///   Name              a bare identifier before desugaring
///   Value             a parameter replaced by a non-object value (null, a
///                     bool, ...); calling through it is an error
/// `field` turns the target into `r.f` (only for This and Object).
struct Ref {
  enum class Kind { This, Object, Param, Name, Value };
  Kind kind = Kind::This;
  ObjectId object;
  std::string name;
  std::optional<std::string> field;
  ExprPtr value;

  static Ref this_ref() { return {}; }
  static Ref this_field(std::string f) {
    Ref r;
    r.field = std::move(f);
    return r;
  }
  static Ref object_ref(ObjectId o, std::optional<std::string> f = std::nullopt) {
    Ref r;
    r.kind = Kind::Object;
    r.object = o;
    r.field = std::move(f);
    return r;
  }
  static Ref param(std::string n) {
    Ref r;
    r.kind = Kind::Param;
    r.name = std::move(n);
    return r;
  }
  static Ref bare(std::string n) {
    Ref r;
    r.kind = Kind::Name;
    r.name = std::move(n);
    return r;
  }
};

/// Base type carried by a checker placeholder standing for an unknown value.
enum class BaseKind { Void, Bool, Float, Enum };

struct Expr {
  struct FieldAssign {
    Ref target;
    std::string field;
    ExprPtr value;
  };
  struct FieldAssignNew {
    Ref target;
    std::string field;
    std::string class_name;
  };
  struct Seq {
    ExprPtr first;
    ExprPtr second;
  };
  struct Call {
    Ref receiver;
    std::string method;
    ExprPtr arg;
  };
  struct Unit {};
  struct FieldRead {
    Ref target;
    std::string field;
  };
  struct Param {
    std::string name;
  };
  /// Bare identifier in surface syntax; gone after desugaring.
  struct Name {
    std::string name;
  };
  struct If {
    ExprPtr cond;
    ExprPtr then_branch;
    ExprPtr else_branch;
  };
  /// `o.l`: the label `l` of enum `enum_name`, tied to object `owner`.
  struct EnumLit {
    Ref owner;
    std::string enum_name;
    std::string label;
  };
  struct MatchArm {
    std::string label;
    ExprPtr body;
    SourceSpan span;
  };
  struct Match {
    ExprPtr scrutinee;
    std::vector<MatchArm> arms;
  };
  struct Null {};
  struct BoolLit {
    bool value;
  };
  struct Labelled {
    std::string label;
    ExprPtr body;
  };
  struct Continue {
    std::string label;
  };
  struct FloatLit {
    double value;
  };
  struct FloatMul {
    ExprPtr lhs;
    ExprPtr rhs;
  };
  struct FloatAdd {
    ExprPtr lhs;
    ExprPtr rhs;
  };
  /// Run-time object reference `o`.
  struct ObjRef {
    ObjectId object;
  };
  /// Checker-only stand-in for a base-typed argument whose value is unknown.
  struct Placeholder {
    BaseKind kind;
    std::string enum_name;
  };

  using Node = std::variant<FieldAssign, FieldAssignNew, Seq, Call, Unit, FieldRead, Param,
                            Name, If, EnumLit, Match, Null, BoolLit, Labelled, Continue,
                            FloatLit, FloatMul, FloatAdd, ObjRef, Placeholder>;

  Node node;
  SourceSpan span;

  template <class T>
  const T* as() const {
    return std::get_if<T>(&node);
  }
  template <class T>
  bool is() const {
    return std::holds_alternative<T>(node);
  }
};

ExprPtr make_expr(Expr::Node node, SourceSpan span = {});

/// Values of the calculus: unit, null, booleans, floats, `o` and `o.l`.
bool is_value(const Expr& e);

struct FieldDecl {
  std::string name;
  TypeAnnot type;
  SourceSpan span;
};

struct MethodDecl {
  std::string name;
  std::string param_name;
  TypeAnnot param_type;
  TypeAnnot return_type;
  ExprPtr body;
  SourceSpan span;
};

struct ClassDecl {
  std::string name;
  UsagePtr usage;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  SourceSpan span;

  const FieldDecl* find_field(const std::string& f) const;
  const MethodDecl* find_method(const std::string& m) const;
};

struct EnumDecl {
  std::string name;
  std::vector<std::string> labels;
  SourceSpan span;

  bool has_label(const std::string& l) const;
};

using Decl = std::variant<ClassDecl, EnumDecl>;

inline constexpr const char* kMainClass = "Main";
inline constexpr const char* kMainMethod = "main";

/// A desugared program: declarations plus the distinguished Main class.
struct Program {
  std::vector<Decl> decls;
  ClassDecl main;

  const ClassDecl* find_class(const std::string& name) const;
  const EnumDecl* find_enum(const std::string& name) const;
  /// The enum declaring `label`. Labels are unique across enums.
  const EnumDecl* enum_of_label(const std::string& label) const;
};

// ---------------------------------------------------------------------------
// Surface syntax: what the parser produces before desugaring.

struct SurfaceParam {
  std::string name;
  TypeAnnot type;
};

struct SurfaceMethod {
  std::string name;
  std::optional<SurfaceParam> param;
  std::optional<TypeAnnot> return_type;
  ExprPtr body;
  SourceSpan span;
};

struct SurfaceClass {
  std::string name;
  UsagePtr usage;
  std::vector<FieldDecl> fields;
  std::vector<SurfaceMethod> methods;
  SourceSpan span;
};

struct SurfaceMain {
  std::vector<FieldDecl> fields;
  ExprPtr body;
  SourceSpan span;
};

struct SurfaceProgram {
  std::vector<std::variant<SurfaceClass, EnumDecl>> decls;
  SurfaceMain main;
};

// ---------------------------------------------------------------------------
// Substitutions shared by the checker and the interpreter.

/// e[this := o]
ExprPtr substitute_this(const ExprPtr& e, ObjectId o);

/// e[x := v]; `value` must be a value expression. As a call receiver the
/// parameter becomes `o` when `value` is an object reference.
ExprPtr substitute_param(const ExprPtr& e, const ExprPtr& value);

/// e[continue k := loop], stopping at inner binders of the same label.
ExprPtr substitute_continue(const ExprPtr& e, const std::string& label, const ExprPtr& loop);

/// True if some subexpression is a concrete object reference (ObjRef, or a
/// Ref of kind Object).
bool contains_object_reference(const ExprPtr& e);

}  // namespace typestate
