// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/interpreter.hpp"

#include <sstream>

#include "overloaded.hpp"
#include "typestate/printer.hpp"
#include "typestate/usage_lts.hpp"

namespace typestate {

const ExprPtr* HeapObject::find(const std::string& field) const {
  for (const auto& [name, value] : fields)
    if (name == field) return &value;
  return nullptr;
}

const HeapObject* Heap::find(ObjectId o) const {
  auto it = objects_.find(o);
  return it == objects_.end() ? nullptr : it->second.get();
}

Heap Heap::with_object(ObjectId o, HeapObject obj) const {
  Heap out = *this;
  out.objects_[o] = std::make_shared<const HeapObject>(std::move(obj));
  return out;
}

Heap Heap::with_field(ObjectId o, const std::string& field, ExprPtr value) const {
  const HeapObject* obj = find(o);
  if (!obj) throw TypestateError("DanglingReference", "object " + to_string(o) + " is not in the heap");
  HeapObject copy = *obj;
  for (auto& [name, v] : copy.fields) {
    if (name == field) {
      v = std::move(value);
      return with_object(o, std::move(copy));
    }
  }
  throw TypestateError("UnknownField", "object " + to_string(o) + " has no field '" + field + "'");
}

ObjectId Heap::fresh() const {
  return objects_.empty() ? ObjectId{0} : ObjectId{objects_.rbegin()->first.value + 1};
}

std::string render_value(const ExprPtr& v) { return print_expr(v); }

std::string render_heap(const Heap& h) {
  std::ostringstream out;
  for (const auto& [o, obj] : h) {
    out << to_string(o) << " ↦ (" << obj->class_name << ", {";
    for (std::size_t i = 0; i < obj->fields.size(); ++i) {
      out << (i ? ", " : "") << obj->fields[i].first << " ↦ " << render_value(obj->fields[i].second);
    }
    out << "})\n";
  }
  return out.str();
}

std::vector<std::pair<std::string, ExprPtr>> init_vals(const Program& program,
                                                       const std::vector<FieldDecl>& fields,
                                                       ObjectId owner) {
  std::vector<std::pair<std::string, ExprPtr>> out;
  for (const auto& f : fields) {
    ExprPtr v;
    switch (f.type.kind) {
      case TypeAnnot::Kind::Bool: v = make_expr(Expr::BoolLit{false}); break;
      case TypeAnnot::Kind::Void: v = make_expr(Expr::Unit{}); break;
      case TypeAnnot::Kind::Float: v = make_expr(Expr::FloatLit{0.0}); break;
      case TypeAnnot::Kind::Enum: {
        const EnumDecl* e = program.find_enum(f.type.name);
        if (!e || e->labels.empty())
          throw TypestateError("UnknownEnum", "unknown enum " + f.type.name);
        v = make_expr(Expr::EnumLit{Ref::object_ref(owner), e->name, e->labels.front()});
        break;
      }
      default: v = make_expr(Expr::Null{}); break;
    }
    out.emplace_back(f.name, std::move(v));
  }
  return out;
}

Config initial_config(const Program& program) {
  constexpr ObjectId main_object{0};
  Heap h = Heap{}.with_object(
      main_object, {program.main.name, init_vals(program, program.main.fields, main_object)});
  const MethodDecl* main = program.main.find_method(kMainMethod);
  if (!main) throw TypestateError("MissingMain", "program has no main method");
  ExprPtr body = substitute_param(substitute_this(main->body, main_object),
                                  make_expr(Expr::Unit{}, main->span));
  return {std::move(h), std::move(body)};
}

const std::vector<std::string>& reduction_rule_names() {
  static const std::vector<std::string> names = {"ctx",   "assign", "seq",    "if-true",
                                                 "if-false", "lab", "match", "call-d",
                                                 "call-ind", "new", "fld"};
  return names;
}

namespace {

[[noreturn]] void stuck(const ExprPtr& e, const std::string& why) {
  throw TypestateError("StuckConfig", "stuck at '" + print_expr(e) + "': " + why);
}

class Stepper {
 public:
  explicit Stepper(const Program& program) : program_(program) {}

  /// Reduces the leftmost-innermost redex of `e` over `h`.
  StepResult reduce(const Heap& h, const ExprPtr& e) {
    const SourceSpan span = e->span;
    auto rebuild = [&](const ExprPtr& inner, const auto& wrap) {
      StepResult r = reduce(h, inner);
      r.next.expr = make_expr(wrap(r.next.expr), span);
      r.in_context = true;
      return r;
    };
    auto plain = [&](const char* rule, ExprPtr next, Heap heap) {
      StepResult r;
      r.rule = rule;
      r.next = {std::move(heap), std::move(next)};
      return r;
    };

    return std::visit(
        detail::Overloaded{
            [&](const Expr::Seq& s) -> StepResult {
              if (is_value(*s.first)) return plain("seq", s.second, h);
              return rebuild(s.first, [&](ExprPtr x) { return Expr::Seq{x, s.second}; });
            },
            [&](const Expr::FieldAssign& a) -> StepResult {
              if (!is_value(*a.value))
                return rebuild(a.value, [&](ExprPtr x) { return Expr::FieldAssign{a.target, a.field, x}; });
              ObjectId o = object_of(a.target, e);
              StepResult r = plain("assign", make_expr(Expr::Unit{}, span), h.with_field(o, a.field, a.value));
              r.write = FieldWrite{o, a.field, a.value};
              return r;
            },
            [&](const Expr::FieldAssignNew& n) -> StepResult {
              ObjectId o = object_of(n.target, e);
              const ClassDecl* cls = program_.find_class(n.class_name);
              if (!cls) stuck(e, "unknown class " + n.class_name);
              ObjectId fresh = h.fresh();
              Heap next = h.with_object(fresh, {cls->name, init_vals(program_, cls->fields, fresh)})
                              .with_field(o, n.field, make_expr(Expr::ObjRef{fresh}));
              StepResult r = plain("new", make_expr(Expr::Unit{}, span), std::move(next));
              r.allocated = fresh;
              r.write = FieldWrite{o, n.field, make_expr(Expr::ObjRef{fresh})};
              return r;
            },
            [&](const Expr::Call& c) -> StepResult {
              if (!is_value(*c.arg))
                return rebuild(c.arg, [&](ExprPtr x) { return Expr::Call{c.receiver, c.method, x}; });
              return call(h, e, c);
            },
            [&](const Expr::FieldRead& r) -> StepResult {
              ObjectId o = object_of(r.target, e);
              const HeapObject* obj = h.find(o);
              const ExprPtr* v = obj ? obj->find(r.field) : nullptr;
              if (!v) stuck(e, "no field '" + r.field + "' on " + to_string(o));
              return plain("fld", *v, h);
            },
            [&](const Expr::If& i) -> StepResult {
              if (!is_value(*i.cond))
                return rebuild(i.cond, [&](ExprPtr x) { return Expr::If{x, i.then_branch, i.else_branch}; });
              const auto* b = i.cond->as<Expr::BoolLit>();
              if (!b) stuck(e, "condition is not a boolean");
              return b->value ? plain("if-true", i.then_branch, h) : plain("if-false", i.else_branch, h);
            },
            [&](const Expr::Labelled& l) -> StepResult {
              return plain("lab", substitute_continue(l.body, l.label, e), h);
            },
            [&](const Expr::Match& m) -> StepResult {
              if (!is_value(*m.scrutinee))
                return rebuild(m.scrutinee, [&](ExprPtr x) { return Expr::Match{x, m.arms}; });
              const auto* lit = m.scrutinee->as<Expr::EnumLit>();
              if (!lit) stuck(e, "match on a non-label value");
              for (const auto& arm : m.arms) {
                if (arm.label != lit->label) continue;
                StepResult r = plain("match", arm.body, h);
                r.label = EnvLabel::choice(lit->owner.object, lit->label);
                return r;
              }
              stuck(e, "no arm for label " + lit->label);
            },
            [&](const Expr::FloatMul& m) -> StepResult {
              return arith(h, e, m.lhs, m.rhs, [](double a, double b) { return a * b; },
                           [](ExprPtr l, ExprPtr r) { return Expr::FloatMul{l, r}; });
            },
            [&](const Expr::FloatAdd& a) -> StepResult {
              return arith(h, e, a.lhs, a.rhs, [](double x, double y) { return x + y; },
                           [](ExprPtr l, ExprPtr r) { return Expr::FloatAdd{l, r}; });
            },
            [&](const auto&) -> StepResult { stuck(e, "no rule applies"); },
        },
        e->node);
  }

 private:
  static ObjectId object_of(const Ref& r, const ExprPtr& e) {
    if (r.kind == Ref::Kind::Object && !r.field) return r.object;
    if (r.kind == Ref::Kind::Value && r.value && r.value->is<Expr::Null>())
      throw TypestateError("NullDereference", "null dereference at '" + print_expr(e) + "'");
    stuck(e, "target is not an object reference");
  }

  template <class Op, class Wrap>
  StepResult arith(const Heap& h, const ExprPtr& e, const ExprPtr& lhs, const ExprPtr& rhs, Op op,
                   Wrap wrap) {
    if (!is_value(*lhs)) {
      StepResult r = reduce(h, lhs);
      r.next.expr = make_expr(wrap(r.next.expr, rhs), e->span);
      r.in_context = true;
      return r;
    }
    if (!is_value(*rhs)) {
      StepResult r = reduce(h, rhs);
      r.next.expr = make_expr(wrap(lhs, r.next.expr), e->span);
      r.in_context = true;
      return r;
    }
    const auto* a = lhs->as<Expr::FloatLit>();
    const auto* b = rhs->as<Expr::FloatLit>();
    if (!a || !b) stuck(e, "arithmetic on non-float values");
    StepResult r;
    r.rule = "float-op";
    r.next = {h, make_expr(Expr::FloatLit{op(a->value, b->value)}, e->span)};
    return r;
  }

  StepResult call(const Heap& h, const ExprPtr& e, const Expr::Call& c) {
    const Ref& recv = c.receiver;
    if (recv.kind == Ref::Kind::Value && recv.value && recv.value->is<Expr::Null>())
      throw TypestateError("NullDereference", "call on null at '" + print_expr(e) + "'");
    if (recv.kind != Ref::Kind::Object) stuck(e, "receiver is not an object reference");

    ObjectId target = recv.object;
    const char* rule = "call-d";
    if (recv.field) {
      rule = "call-ind";
      const HeapObject* holder = h.find(recv.object);
      const ExprPtr* v = holder ? holder->find(*recv.field) : nullptr;
      if (!v) stuck(e, "no field '" + *recv.field + "' on " + to_string(recv.object));
      if ((*v)->is<Expr::Null>())
        throw TypestateError("NullDereference",
                             "field " + to_string(recv.object) + "." + *recv.field +
                                 " is null when calling " + c.method);
      const auto* ref = (*v)->as<Expr::ObjRef>();
      if (!ref) stuck(e, "field does not hold an object");
      target = ref->object;
    }
    const HeapObject* obj = h.find(target);
    if (!obj) stuck(e, "dangling reference " + to_string(target));
    const ClassDecl* cls = program_.find_class(obj->class_name);
    const MethodDecl* m = cls ? cls->find_method(c.method) : nullptr;
    if (!m) stuck(e, "no method " + c.method + " on class " + obj->class_name);

    ExprPtr body = substitute_param(substitute_this(m->body, target), c.arg);
    // A void method discards the value of its body.
    if (m->return_type.kind == TypeAnnot::Kind::Void)
      body = make_expr(Expr::Seq{body, make_expr(Expr::Unit{}, e->span)}, e->span);
    StepResult r;
    r.rule = rule;
    r.label = EnvLabel::method(target, c.method);
    r.next = {h, std::move(body)};
    return r;
  }

  const Program& program_;
};

bool value_fits(const FieldType& z, const ExprPtr& v) {
  switch (z.kind) {
    case FieldType::Kind::Reference: {
      const auto* r = v->as<Expr::ObjRef>();
      return r && r->object == z.target;
    }
    case FieldType::Kind::Bot: return v->is<Expr::Null>();
    case FieldType::Kind::Bool: return v->is<Expr::BoolLit>();
    case FieldType::Kind::Void: return v->is<Expr::Unit>();
    case FieldType::Kind::Float: return v->is<Expr::FloatLit>();
    case FieldType::Kind::Enum: {
      const auto* l = v->as<Expr::EnumLit>();
      return l && l->enum_name == z.enum_name && l->owner.kind == Ref::Kind::Object;
    }
  }
  return false;
}

}  // namespace

std::optional<StepResult> step(const Program& program, const Config& config) {
  if (is_value(*config.expr)) return std::nullopt;
  return Stepper(program).reduce(config.heap, config.expr);
}

bool consistent(const TypeEnv& env, const Heap& h) {
  if (env.size() != h.size()) return false;
  for (const auto& [o, binding] : env) {
    const HeapObject* obj = h.find(o);
    if (!obj || obj->class_name != binding->type.class_name) return false;
    const auto& entries = binding->fields.entries();
    if (entries.size() != obj->fields.size()) return false;
    for (const auto& [f, z] : entries) {
      const ExprPtr* v = obj->find(f);
      if (!v || !value_fits(z, *v)) return false;
    }
  }
  return true;
}

Monitor monitor_allocate(const Monitor& m, ObjectId o, const UsagePtr& usage) {
  Monitor out = m;
  out.usages[o] = usage;
  return out;
}

Monitor monitor_step(const Monitor& m, const EnvLabel& label) {
  if (label.kind == EnvLabel::Kind::Eps) return m;
  auto it = m.usages.find(label.object);
  if (it == m.usages.end())
    throw TypestateError("MonitorViolation", "untracked object " + to_string(label.object));
  UsageAction action = label.kind == EnvLabel::Kind::Method ? UsageAction::method(label.name)
                                                            : UsageAction::label(label.name);
  auto next = usage_step(it->second, action);
  if (!next)
    throw TypestateError("MonitorViolation", render_label(label) + " is not allowed by usage " +
                                                 render_usage(it->second));
  Monitor out = m;
  out.usages[label.object] = *next;
  return out;
}

bool check_completion(const Monitor& m) {
  for (const auto& [o, u] : m.usages)
    if (!terminated(u)) return false;
  return true;
}

RunResult run(const Program& program, const RunOptions& options) {
  RunResult result;
  auto fail = [&](const std::string& kind, const std::string& message,
                  std::optional<ObjectId> object = std::nullopt) {
    Diagnostic d;
    d.kind = kind;
    d.rule = "run";
    d.message = message;
    if (object) {
      d.object = to_string(*object);
      if (auto it = result.monitor.usages.find(*object); it != result.monitor.usages.end())
        d.usage = render_usage(it->second);
    }
    result.error = std::move(d);
  };

  try {
    result.final = initial_config(program);
  } catch (const TypestateError& err) {
    fail(err.kind(), err.what());
    return result;
  }
  result.monitor.usages[ObjectId{0}] = usage_end();

  while (true) {
    std::optional<StepResult> s;
    try {
      s = step(program, result.final);
    } catch (const TypestateError& err) {
      fail(err.kind(), err.what());
      return result;
    }
    if (!s) break;
    if (result.steps == options.fuel) {
      fail("FuelExhausted", "fuel exhausted after " + std::to_string(options.fuel) + " steps");
      return result;
    }
    ++result.steps;
    result.trace.push_back({result.steps, s->label, s->rule});
    if (options.on_step) options.on_step(result.final, *s);
    if (options.monitor) {
      if (s->allocated) {
        const HeapObject* obj = s->next.heap.find(*s->allocated);
        result.monitor = monitor_allocate(result.monitor, *s->allocated,
                                          program.find_class(obj->class_name)->usage);
      }
      try {
        result.monitor = monitor_step(result.monitor, s->label);
      } catch (const TypestateError& err) {
        result.final = std::move(s->next);
        fail("MonitorViolation", err.what(), s->label.object);
        return result;
      }
    }
    result.final = std::move(s->next);
  }

  result.reached_value = true;
  if (options.monitor) {
    result.completed = check_completion(result.monitor);
    if (!result.completed) {
      for (const auto& [o, u] : result.monitor.usages) {
        if (terminated(u)) continue;
        fail("UnfinishedProtocol", "object " + to_string(o) + " ended with usage " + render_usage(u), o);
        break;
      }
    }
  }
  return result;
}

}  // namespace typestate
