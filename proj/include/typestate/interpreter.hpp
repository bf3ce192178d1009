// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typestate/ast.hpp"
#include "typestate/source.hpp"
#include "typestate/type_env.hpp"

namespace typestate {

// Values are expressions satisfying is_value: unit, null, true/false, float
// literals, object references and enum labels owned by an object (EnumLit
// whose owner is a concrete reference).

struct HeapObject {
  std::string class_name;
  /// Declaration order.
  std::vector<std::pair<std::string, ExprPtr>> fields;

  const ExprPtr* find(const std::string& field) const;
};

/// The concrete heap h. Immutable; updates return a new heap.
class Heap {
 public:
  using Map = std::map<ObjectId, std::shared_ptr<const HeapObject>>;

  const HeapObject* find(ObjectId o) const;
  bool contains(ObjectId o) const { return objects_.count(o) != 0; }
  Heap with_object(ObjectId o, HeapObject obj) const;
  /// Throws TypestateError("UnknownField") if the field does not exist.
  Heap with_field(ObjectId o, const std::string& field, ExprPtr value) const;
  ObjectId fresh() const;

  std::size_t size() const { return objects_.size(); }
  Map::const_iterator begin() const { return objects_.begin(); }
  Map::const_iterator end() const { return objects_.end(); }

 private:
  Map objects_;
};

/// `o1 ↦ (BankAccount, {amount ↦ 105.0})`, one object per line.
std::string render_heap(const Heap& h);
std::string render_value(const ExprPtr& v);

/// Initial field values of an object `owner` with these fields. Throws
/// TypestateError("UnknownEnum").
std::vector<std::pair<std::string, ExprPtr>> init_vals(const Program& program,
                                                       const std::vector<FieldDecl>& fields,
                                                       ObjectId owner);

struct Config {
  Heap heap;
  ExprPtr expr;
};

/// `{o0 ↦ (Main, initvals)}` with the main body, `this` bound to o0.
Config initial_config(const Program& program);

struct FieldWrite {
  ObjectId object;
  std::string field;
  ExprPtr value;
};

struct StepResult {
  EnvLabel label;
  Config next;
  /// The base rule: assign, seq, if-true, if-false, lab, match, call-d,
  /// call-ind, new, fld, or float-op.
  std::string rule;
  /// The redex sat inside an evaluation context, so (ctx) was applied.
  bool in_context = false;
  std::optional<ObjectId> allocated;
  /// Set by assign and new.
  std::optional<FieldWrite> write;
};

/// The reduction rules of the calculus.
const std::vector<std::string>& reduction_rule_names();

/// One labelled reduction step, or nullopt when the expression is a value.
/// Throws TypestateError with kind StuckConfig or NullDereference.
std::optional<StepResult> step(const Program& program, const Config& config);

/// Heap consistency `Gamma |- h`.
bool consistent(const TypeEnv& env, const Heap& h);

/// Tracked usage per allocated object.
struct Monitor {
  std::map<ObjectId, UsagePtr> usages;
};

/// Registers a freshly allocated object with its class's declared usage.
Monitor monitor_allocate(const Monitor& m, ObjectId o, const UsagePtr& usage);

/// Eps leaves the monitor unchanged; method and choice labels step the
/// object's usage. Throws TypestateError("MonitorViolation").
Monitor monitor_step(const Monitor& m, const EnvLabel& label);

bool check_completion(const Monitor& m);

struct TraceRecord {
  std::size_t step = 0;
  EnvLabel label;
  std::string rule;
};

struct RunOptions {
  std::size_t fuel = 1'000'000;
  bool monitor = true;
  /// Called after every step with the configuration it started from.
  std::function<void(const Config& before, const StepResult&)> on_step;
};

struct RunResult {
  std::vector<TraceRecord> trace;
  Config final;
  Monitor monitor;
  std::size_t steps = 0;
  /// Set once the final expression is a value.
  bool reached_value = false;
  bool completed = false;
  /// FuelExhausted, StuckConfig, NullDereference, MonitorViolation or
  /// UnfinishedProtocol; the trace runs up to the failing step.
  std::optional<Diagnostic> error;
};

RunResult run(const Program& program, const RunOptions& options = {});

}  // namespace typestate
