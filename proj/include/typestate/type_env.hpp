// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typestate/ast.hpp"
#include "typestate/usage.hpp"

namespace typestate {

/// Field tag `z`: a base type, or a reference to an object of the environment.
struct FieldType {
  enum class Kind { Bool, Void, Bot, Enum, Float, Reference };
  Kind kind = Kind::Void;
  std::string enum_name;
  ObjectId target;

  static FieldType bool_tag() { return {Kind::Bool, {}, {}}; }
  static FieldType void_tag() { return {Kind::Void, {}, {}}; }
  static FieldType bot_tag() { return {Kind::Bot, {}, {}}; }
  static FieldType float_tag() { return {Kind::Float, {}, {}}; }
  static FieldType enum_tag(std::string l) { return {Kind::Enum, std::move(l), {}}; }
  static FieldType reference(ObjectId o) { return {Kind::Reference, {}, o}; }

  bool operator==(const FieldType&) const = default;
};

std::string render_field_type(const FieldType& z);

/// Field typing environment `lambda`, in declaration order, one binding per name.
class FieldTypeEnv {
 public:
  using Entry = std::pair<std::string, FieldType>;

  FieldTypeEnv() = default;
  explicit FieldTypeEnv(std::vector<Entry> entries);

  const FieldType* find(const std::string& field) const;
  /// Copy with `field` rebound; the field must already exist.
  FieldTypeEnv with(const std::string& field, FieldType z) const;

  const std::vector<Entry>& entries() const { return entries_; }
  bool operator==(const FieldTypeEnv&) const = default;

 private:
  std::vector<Entry> entries_;
};

/// `o[C, U]`
struct ObjectType {
  ObjectId ref;
  std::string class_name;
  UsagePtr usage;
};

/// `T ::= o[C, U] | void | bool | float | bot | L | L link o`
struct ValueType {
  enum class Kind { Object, Void, Bool, Float, Bot, Enum, EnumLink };
  Kind kind = Kind::Void;
  ObjectType object;
  std::string enum_name;
  ObjectId link;

  static ValueType of_object(ObjectType t) { return {Kind::Object, std::move(t), {}, {}}; }
  static ValueType void_type() { return {Kind::Void, {}, {}, {}}; }
  static ValueType bool_type() { return {Kind::Bool, {}, {}, {}}; }
  static ValueType float_type() { return {Kind::Float, {}, {}, {}}; }
  static ValueType bot() { return {Kind::Bot, {}, {}, {}}; }
  static ValueType enum_type(std::string l) { return {Kind::Enum, {}, std::move(l), {}}; }
  static ValueType enum_link(std::string l, ObjectId o) {
    return {Kind::EnumLink, {}, std::move(l), o};
  }
};

std::string render_value_type(const ValueType& t);

/// Equal kinds and payloads; object types compare usages up to bisimilarity.
bool same_value_type(const ValueType& a, const ValueType& b);

struct ObjectBinding {
  ObjectType type;
  FieldTypeEnv fields;
};

/// Typing environment `Gamma`: the checker's abstract heap. Immutable; every
/// update returns a new environment sharing the untouched bindings.
class TypeEnv {
 public:
  using Map = std::map<ObjectId, std::shared_ptr<const ObjectBinding>>;

  const ObjectBinding* find(ObjectId o) const;
  /// Throws TypestateError("DanglingReference") when `o` is unbound.
  const ObjectBinding& at(ObjectId o) const;
  bool contains(ObjectId o) const { return bindings_.count(o) != 0; }

  TypeEnv with_object(ObjectBinding binding) const;
  TypeEnv with_usage(ObjectId o, UsagePtr usage) const;
  TypeEnv with_field(ObjectId o, const std::string& field, FieldType z) const;

  /// The reference the next allocation receives.
  ObjectId fresh() const;

  std::size_t size() const { return bindings_.size(); }
  bool empty() const { return bindings_.empty(); }
  Map::const_iterator begin() const { return bindings_.begin(); }
  Map::const_iterator end() const { return bindings_.end(); }

 private:
  Map bindings_;
};

/// `o0 ↦ (Main[end], {account ↦ o1}), ...`, one binding per line.
std::string render_env(const TypeEnv& env);

/// Stable 64-bit digest of render_env, for rule traces.
std::uint64_t env_hash(const TypeEnv& env);

/// Transition labels shared by typing environments and the run-time semantics.
struct EnvLabel {
  enum class Kind { Eps, Method, Choice };
  Kind kind = Kind::Eps;
  ObjectId object;
  std::string name;

  static EnvLabel eps() { return {}; }
  static EnvLabel method(ObjectId o, std::string m) { return {Kind::Method, o, std::move(m)}; }
  static EnvLabel choice(ObjectId o, std::string l) { return {Kind::Choice, o, std::move(l)}; }

  bool operator==(const EnvLabel&) const = default;
};

/// `eps`, `o3.addSalary` or `o3#tt`.
std::string render_label(const EnvLabel& label);

// ---------------------------------------------------------------------------
// Auxiliary functions of the type system.

FieldTypeEnv init_types(const std::vector<FieldDecl>& fields);

bool agree(const TypeAnnot& declared, const ValueType& actual);
bool returns(const TypeAnnot& declared, const ValueType& actual);

/// Unpacks a field tag. Throws TypestateError("DanglingReference").
ValueType get_type(const FieldType& z, const TypeEnv& env);

/// Packs a value type into a field tag. Throws TypestateError("LinkNotStorable").
FieldType vtype(const ValueType& t);

/// Every object's protocol is finished.
bool term(const TypeEnv& env);

/// Same objects, classes and field maps; usages bisimilar.
bool env_equal(const TypeEnv& a, const TypeEnv& b);

/// Whether `from --label--> to` is one transition of the typing-environment
/// transition system (empty, trans, update, new).
bool env_step_check(const Program& program, const TypeEnv& from, const EnvLabel& label,
                    const TypeEnv& to);

}  // namespace typestate
