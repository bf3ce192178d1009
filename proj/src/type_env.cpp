// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/type_env.hpp"

#include <algorithm>

#include "typestate/usage_lts.hpp"

namespace typestate {

std::string render_field_type(const FieldType& z) {
  switch (z.kind) {
    case FieldType::Kind::Bool:
      return "bool";
    case FieldType::Kind::Void:
      return "void";
    case FieldType::Kind::Bot:
      return "⊥";
    case FieldType::Kind::Float:
      return "float";
    case FieldType::Kind::Enum:
      return z.enum_name;
    case FieldType::Kind::Reference:
      return to_string(z.target);
  }
  return "?";
}

FieldTypeEnv::FieldTypeEnv(std::vector<Entry> entries) : entries_(std::move(entries)) {}

const FieldType* FieldTypeEnv::find(const std::string& field) const {
  for (const auto& [name, z] : entries_) {
    if (name == field) return &z;
  }
  return nullptr;
}

FieldTypeEnv FieldTypeEnv::with(const std::string& field, FieldType z) const {
  FieldTypeEnv out = *this;
  for (auto& [name, tag] : out.entries_) {
    if (name == field) {
      tag = std::move(z);
      return out;
    }
  }
  throw TypestateError("UnknownField", "no field " + field + " in field environment");
}

std::string render_value_type(const ValueType& t) {
  switch (t.kind) {
    case ValueType::Kind::Object:
      return to_string(t.object.ref) + "[" + t.object.class_name + ", " +
             render_usage(t.object.usage) + "]";
    case ValueType::Kind::Void:
      return "void";
    case ValueType::Kind::Bool:
      return "bool";
    case ValueType::Kind::Float:
      return "float";
    case ValueType::Kind::Bot:
      return "⊥";
    case ValueType::Kind::Enum:
      return t.enum_name;
    case ValueType::Kind::EnumLink:
      return t.enum_name + " link " + to_string(t.link);
  }
  return "?";
}

bool same_value_type(const ValueType& a, const ValueType& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case ValueType::Kind::Object:
      return a.object.ref == b.object.ref && a.object.class_name == b.object.class_name &&
             bisimilar(a.object.usage, b.object.usage);
    case ValueType::Kind::Enum:
      return a.enum_name == b.enum_name;
    case ValueType::Kind::EnumLink:
      return a.enum_name == b.enum_name && a.link == b.link;
    default:
      return true;
  }
}

// ---------------------------------------------------------------------------

const ObjectBinding* TypeEnv::find(ObjectId o) const {
  auto it = bindings_.find(o);
  return it == bindings_.end() ? nullptr : it->second.get();
}

const ObjectBinding& TypeEnv::at(ObjectId o) const {
  if (const auto* b = find(o)) return *b;
  throw TypestateError("DanglingReference", "object " + to_string(o) + " is not in the environment");
}

TypeEnv TypeEnv::with_object(ObjectBinding binding) const {
  TypeEnv out = *this;
  ObjectId key = binding.type.ref;
  out.bindings_[key] = std::make_shared<const ObjectBinding>(std::move(binding));
  return out;
}

TypeEnv TypeEnv::with_usage(ObjectId o, UsagePtr usage) const {
  ObjectBinding b = at(o);
  b.type.usage = std::move(usage);
  return with_object(std::move(b));
}

TypeEnv TypeEnv::with_field(ObjectId o, const std::string& field, FieldType z) const {
  ObjectBinding b = at(o);
  b.fields = b.fields.with(field, std::move(z));
  return with_object(std::move(b));
}

ObjectId TypeEnv::fresh() const {
  if (bindings_.empty()) return ObjectId{0};
  return ObjectId{bindings_.rbegin()->first.value + 1};
}

std::string render_env(const TypeEnv& env) {
  std::string out;
  for (const auto& [o, b] : env) {
    if (!out.empty()) out += '\n';
    out += to_string(o) + " ↦ (" + b->type.class_name + "[" + render_usage(b->type.usage) + "], {";
    bool first = true;
    for (const auto& [name, z] : b->fields.entries()) {
      if (!first) out += ", ";
      first = false;
      out += name + " ↦ " + render_field_type(z);
    }
    out += "})";
  }
  return out;
}

std::uint64_t env_hash(const TypeEnv& env) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : render_env(env)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string render_label(const EnvLabel& label) {
  switch (label.kind) {
    case EnvLabel::Kind::Eps:
      return "eps";
    case EnvLabel::Kind::Method:
      return to_string(label.object) + "." + label.name;
    case EnvLabel::Kind::Choice:
      return to_string(label.object) + "#" + label.name;
  }
  return "?";
}

// ---------------------------------------------------------------------------

FieldTypeEnv init_types(const std::vector<FieldDecl>& fields) {
  std::vector<FieldTypeEnv::Entry> entries;
  entries.reserve(fields.size());
  for (const auto& f : fields) {
    FieldType z;
    switch (f.type.kind) {
      case TypeAnnot::Kind::Bool:
        z = FieldType::bool_tag();
        break;
      case TypeAnnot::Kind::Void:
        z = FieldType::void_tag();
        break;
      case TypeAnnot::Kind::Float:
        z = FieldType::float_tag();
        break;
      case TypeAnnot::Kind::Enum:
        z = FieldType::enum_tag(f.type.name);
        break;
      case TypeAnnot::Kind::Class:
      case TypeAnnot::Kind::Named:
        z = FieldType::bot_tag();
        break;
    }
    entries.emplace_back(f.name, std::move(z));
  }
  return FieldTypeEnv(std::move(entries));
}

bool agree(const TypeAnnot& declared, const ValueType& actual) {
  switch (declared.kind) {
    case TypeAnnot::Kind::Class:
      return actual.kind == ValueType::Kind::Bot ||
             (actual.kind == ValueType::Kind::Object && actual.object.class_name == declared.name);
    case TypeAnnot::Kind::Bool:
      return actual.kind == ValueType::Kind::Bool;
    case TypeAnnot::Kind::Void:
      return actual.kind == ValueType::Kind::Void;
    case TypeAnnot::Kind::Float:
      return actual.kind == ValueType::Kind::Float;
    case TypeAnnot::Kind::Enum:
      return actual.kind == ValueType::Kind::Enum && actual.enum_name == declared.name;
    case TypeAnnot::Kind::Named:
      return false;
  }
  return false;
}

bool returns(const TypeAnnot& declared, const ValueType& actual) {
  if (agree(declared, actual)) return true;
  return declared.kind == TypeAnnot::Kind::Enum && actual.kind == ValueType::Kind::EnumLink &&
         actual.enum_name == declared.name;
}

ValueType get_type(const FieldType& z, const TypeEnv& env) {
  switch (z.kind) {
    case FieldType::Kind::Reference:
      return ValueType::of_object(env.at(z.target).type);
    case FieldType::Kind::Bool:
      return ValueType::bool_type();
    case FieldType::Kind::Void:
      return ValueType::void_type();
    case FieldType::Kind::Bot:
      return ValueType::bot();
    case FieldType::Kind::Float:
      return ValueType::float_type();
    case FieldType::Kind::Enum:
      return ValueType::enum_type(z.enum_name);
  }
  return ValueType::void_type();
}

FieldType vtype(const ValueType& t) {
  switch (t.kind) {
    case ValueType::Kind::Object:
      return FieldType::reference(t.object.ref);
    case ValueType::Kind::Void:
      return FieldType::void_tag();
    case ValueType::Kind::Bool:
      return FieldType::bool_tag();
    case ValueType::Kind::Float:
      return FieldType::float_tag();
    case ValueType::Kind::Bot:
      return FieldType::bot_tag();
    case ValueType::Kind::Enum:
      return FieldType::enum_tag(t.enum_name);
    case ValueType::Kind::EnumLink:
      break;
  }
  throw TypestateError("LinkNotStorable",
                       "link type " + render_value_type(t) + " cannot be stored in a field");
}

bool term(const TypeEnv& env) {
  return std::all_of(env.begin(), env.end(),
                     [](const auto& entry) { return terminated(entry.second->type.usage); });
}

namespace {

bool binding_equal(const ObjectBinding& a, const ObjectBinding& b) {
  if (&a == &b) return true;
  return a.type.ref == b.type.ref && a.type.class_name == b.type.class_name &&
         a.fields == b.fields && bisimilar(a.type.usage, b.type.usage);
}

/// Objects of `a` whose binding differs in `b` (which must cover dom(a)).
std::vector<ObjectId> differing(const TypeEnv& a, const TypeEnv& b) {
  std::vector<ObjectId> out;
  for (const auto& [o, binding] : a) {
    const auto* other = b.find(o);
    if (!other || !binding_equal(*binding, *other)) out.push_back(o);
  }
  return out;
}

/// Field names whose tags differ; nullopt if the field sets differ.
std::optional<std::vector<std::string>> differing_fields(const FieldTypeEnv& a,
                                                         const FieldTypeEnv& b) {
  if (a.entries().size() != b.entries().size()) return std::nullopt;
  std::vector<std::string> out;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    const auto& [name, z] = a.entries()[i];
    if (b.entries()[i].first != name) return std::nullopt;
    if (!(b.entries()[i].second == z)) out.push_back(name);
  }
  return out;
}

bool same_domain(const TypeEnv& a, const TypeEnv& b) {
  if (a.size() != b.size()) return false;
  return std::all_of(a.begin(), a.end(), [&](const auto& e) { return b.contains(e.first); });
}

/// (update): exactly one field of one object retyped.
bool is_update_step(const TypeEnv& from, const TypeEnv& to) {
  if (!same_domain(from, to)) return false;
  auto diff = differing(from, to);
  if (diff.size() != 1) return false;
  const auto& a = from.at(diff[0]);
  const auto& b = to.at(diff[0]);
  if (a.type.class_name != b.type.class_name || !bisimilar(a.type.usage, b.type.usage))
    return false;
  auto fields = differing_fields(a.fields, b.fields);
  return fields && fields->size() == 1;
}

/// (new): one fresh object with its class's initial type, one field repointed to it.
bool is_new_step(const Program& program, const TypeEnv& from, const TypeEnv& to) {
  if (to.size() != from.size() + 1) return false;
  std::optional<ObjectId> fresh;
  for (const auto& [o, b] : to) {
    if (!from.contains(o)) fresh = o;
  }
  if (!fresh) return false;
  const auto& created = to.at(*fresh);
  const auto* cls = program.find_class(created.type.class_name);
  if (!cls || created.type.ref != *fresh || !bisimilar(created.type.usage, cls->usage) ||
      !(created.fields == init_types(cls->fields)))
    return false;
  auto diff = differing(from, to);
  if (diff.size() != 1) return false;
  const auto& a = from.at(diff[0]);
  const auto& b = to.at(diff[0]);
  if (a.type.class_name != b.type.class_name || !bisimilar(a.type.usage, b.type.usage))
    return false;
  auto fields = differing_fields(a.fields, b.fields);
  if (!fields || fields->size() != 1) return false;
  return *b.fields.find(fields->front()) == FieldType::reference(*fresh);
}

}  // namespace

bool env_equal(const TypeEnv& a, const TypeEnv& b) {
  return same_domain(a, b) && differing(a, b).empty();
}

bool env_step_check(const Program& program, const TypeEnv& from, const EnvLabel& label,
                    const TypeEnv& to) {
  if (label.kind == EnvLabel::Kind::Eps) {
    return env_equal(from, to) || is_update_step(from, to) || is_new_step(program, from, to);
  }
  // (trans): only the labelled object's usage moves.
  if (!same_domain(from, to)) return false;
  const auto* before = from.find(label.object);
  const auto* after = to.find(label.object);
  if (!before || !after) return false;
  auto action = label.kind == EnvLabel::Kind::Method ? UsageAction::method(label.name)
                                                     : UsageAction::label(label.name);
  auto next = usage_step(before->type.usage, action);
  if (!next) return false;
  for (ObjectId o : differing(from, to)) {
    if (o != label.object) return false;
  }
  return before->type.class_name == after->type.class_name && before->fields == after->fields &&
         bisimilar(*next, after->type.usage);
}

}  // namespace typestate
