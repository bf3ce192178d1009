// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/typechecker.hpp"

#include "overloaded.hpp"
#include "typestate/printer.hpp"
#include "typestate/usage_lts.hpp"

namespace typestate {

namespace {

struct TypeError {
  Diagnostic diag;
};

class Checker {
 public:
  Checker(const Program& program, const CheckOptions& options)
      : program_(program), options_(options) {}

  CheckResult check(const RecEnv& theta, const LabelEnv& omega, const TypeEnv& env,
                    const ExprPtr& e, bool hint) {
    return std::visit(
        detail::Overloaded{
            [&](const Expr::Unit&) { return value(e, "Unit", env, ValueType::void_type()); },
            [&](const Expr::BoolLit&) { return value(e, "Bool", env, ValueType::bool_type()); },
            [&](const Expr::Null&) { return value(e, "Null", env, ValueType::bot()); },
            [&](const Expr::FloatLit&) { return value(e, "Float", env, ValueType::float_type()); },
            [&](const Expr::Placeholder& p) {
              return value(e, "Placeholder", env, placeholder_type(p));
            },
            [&](const Expr::ObjRef& o) {
              const ObjectBinding* b = env.find(o.object);
              if (!b) fail("DanglingReference", "Obj", e->span, "unknown object " + to_string(o.object));
              return value(e, "Obj", env, ValueType::of_object(b->type));
            },
            [&](const Expr::FieldRead& r) { return check_field(env, e, r); },
            [&](const Expr::EnumLit& l) { return check_enum(env, e, l, hint); },
            [&](const Expr::FieldAssign& a) { return check_assign(theta, omega, env, e, a); },
            [&](const Expr::FieldAssignNew& n) { return check_new(env, e, n); },
            [&](const Expr::Seq& s) {
              record("Comp", e->span, env);
              CheckResult first = check(theta, omega, env, s.first, false);
              require_done(first, s.first->span, "the first part of a sequence");
              return check(theta, omega, first.env, s.second, hint);
            },
            [&](const Expr::If& i) {
              record("If", e->span, env);
              CheckResult cond = check(theta, omega, env, i.cond, false);
              require_done(cond, i.cond->span, "a condition");
              if (cond.type.kind != ValueType::Kind::Bool)
                fail("ConditionNotBool", "If", i.cond->span,
                     "condition has type " + render_value_type(cond.type) + ", expected bool");
              std::vector<CheckResult> branches;
              branches.push_back(check(theta, omega, cond.env, i.then_branch, hint));
              branches.push_back(check(theta, omega, cond.env, i.else_branch, hint));
              return join(branches, "If", e->span);
            },
            [&](const Expr::Match& m) { return check_match(theta, omega, env, e, m, hint); },
            [&](const Expr::Labelled& l) {
              record("Label", e->span, env);
              LabelEnv inner = omega;
              inner.insert_or_assign(l.label, env);
              return check(theta, inner, env, l.body, hint);
            },
            [&](const Expr::Continue& c) {
              record("Continue", e->span, env);
              auto it = omega.find(c.label);
              if (it == omega.end())
                fail("UnboundLabel", "Continue", e->span, "continue to unknown loop '" + c.label + "'");
              if (!env_equal(it->second, env))
                fail("ContinueEnvMismatch", "Continue", e->span,
                     "environment at 'continue " + c.label + "' differs from the loop entry: " +
                         describe_difference(it->second, env));
              return CheckResult::pending_result();
            },
            [&](const Expr::FloatMul& m) { return check_arith(theta, omega, env, e, m.lhs, m.rhs); },
            [&](const Expr::FloatAdd& a) { return check_arith(theta, omega, env, e, a.lhs, a.rhs); },
            [&](const Expr::Call& c) { return check_call(theta, omega, env, e, c, hint); },
            [&](const Expr::Param& p) -> CheckResult {
              fail("UnboundParameter", "Field", e->span, "parameter '" + p.name + "' was not substituted");
            },
            [&](const Expr::Name& n) -> CheckResult {
              fail("UnknownIdentifier", "Field", e->span, "unresolved identifier '" + n.name + "'");
            },
        },
        e->node);
  }

  std::vector<RuleEvent> trace;
  CheckStats stats;

  [[noreturn]] static void fail(std::string kind, std::string rule, SourceSpan span,
                                std::string message, std::optional<ObjectId> object = std::nullopt,
                                const UsagePtr& usage = nullptr) {
    Diagnostic d;
    d.kind = std::move(kind);
    d.rule = std::move(rule);
    d.span = span;
    d.message = std::move(message);
    if (object) d.object = to_string(*object);
    if (usage) d.usage = render_usage(usage);
    throw TypeError{std::move(d)};
  }

 private:
  void record(const char* rule, SourceSpan span, const TypeEnv& env) {
    if (options_.trace) trace.push_back({rule, span, env_hash(env)});
  }

  CheckResult value(const ExprPtr& e, const char* rule, const TypeEnv& env, ValueType t) {
    record(rule, e->span, env);
    return CheckResult::done(std::move(t), env);
  }

  static ValueType placeholder_type(const Expr::Placeholder& p) {
    switch (p.kind) {
      case BaseKind::Void: return ValueType::void_type();
      case BaseKind::Bool: return ValueType::bool_type();
      case BaseKind::Float: return ValueType::float_type();
      case BaseKind::Enum: return ValueType::enum_type(p.enum_name);
    }
    return ValueType::void_type();
  }

  static void require_done(const CheckResult& r, SourceSpan span, const char* where) {
    if (r.pending)
      fail("RecursionNotInTail", "Comp", span,
           std::string("a recursive call or continue in ") + where +
               " is followed by further evaluation");
  }

  const ClassDecl& class_of(const TypeEnv& env, ObjectId o, SourceSpan span) const {
    const ObjectBinding* b = env.find(o);
    if (!b) fail("DanglingReference", "Field", span, "unknown object " + to_string(o));
    const ClassDecl* cls = program_.find_class(b->type.class_name);
    if (!cls) fail("UnknownClass", "Field", span, "unknown class " + b->type.class_name);
    return *cls;
  }

  /// The object a run-time reference denotes: `o` itself, never a field.
  static ObjectId target_object(const Ref& r, SourceSpan span, const char* rule) {
    switch (r.kind) {
      case Ref::Kind::Object:
        return r.object;
      case Ref::Kind::Value:
        if (r.value && r.value->is<Expr::Null>())
          fail("NullReceiver", rule, span, "receiver is null");
        fail("NotAnObject", rule, span, "receiver is not an object");
      default:
        fail("UnboundReference", rule, span,
             "reference '" + print_ref(r) + "' was not substituted");
    }
  }

  CheckResult check_field(const TypeEnv& env, const ExprPtr& e, const Expr::FieldRead& r) {
    record("Field", e->span, env);
    if (r.target.field)
      fail("NestedFieldAccess", "Field", e->span, "nested field access is not supported");
    ObjectId o = target_object(r.target, e->span, "Field");
    const ObjectBinding& b = env.at(o);
    const FieldType* z = b.fields.find(r.field);
    if (!z)
      fail("UnknownField", "Field", e->span,
           "class " + b.type.class_name + " has no field '" + r.field + "'", o);
    return CheckResult::done(get_type(*z, env), env);
  }

  CheckResult check_enum(const TypeEnv& env, const ExprPtr& e, const Expr::EnumLit& l, bool hint) {
    const char* rule = hint ? "Enum" : "Const";
    record(rule, e->span, env);
    const EnumDecl* decl = program_.find_enum(l.enum_name);
    if (!decl || !decl->has_label(l.label))
      fail("UnknownLabel", rule, e->span, "'" + l.label + "' is not a label of " + l.enum_name);
    if (!hint) return CheckResult::done(ValueType::enum_type(l.enum_name), env);
    ObjectId owner = target_object(l.owner, e->span, rule);
    return CheckResult::done(ValueType::enum_link(l.enum_name, owner), env);
  }

  CheckResult check_assign(const RecEnv& theta, const LabelEnv& omega, const TypeEnv& env,
                           const ExprPtr& e, const Expr::FieldAssign& a) {
    record("Assign", e->span, env);
    ObjectId o = target_object(a.target, e->span, "Assign");
    CheckResult rhs = check(theta, omega, env, a.value, false);
    require_done(rhs, a.value->span, "an assignment");
    const ClassDecl& cls = class_of(rhs.env, o, e->span);
    const FieldDecl* f = cls.find_field(a.field);
    if (!f)
      fail("UnknownField", "Assign", e->span,
           "class " + cls.name + " has no field '" + a.field + "'", o);
    if (rhs.type.kind == ValueType::Kind::EnumLink)
      fail("LinkNotStorable", "Assign", e->span,
           "a value of link type " + render_value_type(rhs.type) + " cannot be stored in field '" +
               a.field + "'",
           o);
    if (!agree(f->type, rhs.type))
      fail("FieldTypeMismatch", "Assign", e->span,
           "field '" + a.field + "' of " + cls.name + " has type " + render_type(f->type) +
               ", assigned " + render_value_type(rhs.type),
           o);
    return CheckResult::done(ValueType::void_type(), rhs.env.with_field(o, a.field, vtype(rhs.type)));
  }

  CheckResult check_new(const TypeEnv& env, const ExprPtr& e, const Expr::FieldAssignNew& n) {
    record("New", e->span, env);
    ObjectId o = target_object(n.target, e->span, "New");
    const ClassDecl& owner = class_of(env, o, e->span);
    const FieldDecl* f = owner.find_field(n.field);
    if (!f)
      fail("UnknownField", "New", e->span,
           "class " + owner.name + " has no field '" + n.field + "'", o);
    const ClassDecl* cls = program_.find_class(n.class_name);
    if (!cls) fail("UnknownClass", "New", e->span, "unknown class " + n.class_name);
    if (f->type.kind != TypeAnnot::Kind::Class || f->type.name != n.class_name)
      fail("FieldTypeMismatch", "New", e->span,
           "field '" + n.field + "' has type " + render_type(f->type) + ", not " + n.class_name, o);
    ObjectId fresh = env.fresh();
    TypeEnv out = env.with_object({{fresh, cls->name, cls->usage}, init_types(cls->fields)})
                      .with_field(o, n.field, FieldType::reference(fresh));
    return CheckResult::done(ValueType::void_type(), std::move(out));
  }

  CheckResult check_arith(const RecEnv& theta, const LabelEnv& omega, const TypeEnv& env,
                          const ExprPtr& e, const ExprPtr& lhs, const ExprPtr& rhs) {
    record("Float-op", e->span, env);
    CheckResult l = check(theta, omega, env, lhs, false);
    require_done(l, lhs->span, "an operand");
    CheckResult r = check(theta, omega, l.env, rhs, false);
    require_done(r, rhs->span, "an operand");
    if (l.type.kind != ValueType::Kind::Float || r.type.kind != ValueType::Kind::Float)
      fail("OperandNotFloat", "Float-op", e->span,
           "arithmetic on " + render_value_type(l.type) + " and " + render_value_type(r.type));
    return CheckResult::done(ValueType::float_type(), r.env);
  }

  CheckResult check_match(const RecEnv& theta, const LabelEnv& omega, const TypeEnv& env,
                          const ExprPtr& e, const Expr::Match& m, bool hint) {
    record("Case", e->span, env);
    CheckResult scrutinee = check(theta, omega, env, m.scrutinee, true);
    require_done(scrutinee, m.scrutinee->span, "a match scrutinee");
    if (scrutinee.type.kind != ValueType::Kind::EnumLink)
      fail("LinkExpected", "Case", m.scrutinee->span,
           "match scrutinee has type " + render_value_type(scrutinee.type) +
               ", expected a label returned by a method (L link o)");
    const EnumDecl* decl = program_.find_enum(scrutinee.type.enum_name);
    if (!decl) fail("UnknownEnum", "Case", e->span, "unknown enum " + scrutinee.type.enum_name);

    std::map<std::string, const Expr::MatchArm*> arms;
    for (const auto& arm : m.arms) {
      if (!decl->has_label(arm.label))
        fail("UnknownLabel", "Case", arm.span,
             "'" + arm.label + "' is not a label of " + decl->name);
      if (!arms.emplace(arm.label, &arm).second)
        fail("DuplicateArm", "Case", arm.span, "label '" + arm.label + "' matched twice");
    }
    std::string missing;
    for (const auto& l : decl->labels)
      if (!arms.count(l)) missing += (missing.empty() ? "" : ", ") + l;
    if (!missing.empty())
      fail("NonExhaustiveMatch", "Case", e->span,
           "match on " + decl->name + " is missing label(s) " + missing);

    ObjectId o = scrutinee.type.link;
    const ObjectBinding& b = scrutinee.env.at(o);
    std::vector<CheckResult> results;
    for (const auto& l : decl->labels) {
      auto next = usage_step(b.type.usage, UsageAction::label(l));
      if (!next)
        fail("ChoiceNotAvailable", "Case", arms[l]->span,
             "label " + l + " is not a choice of " + to_string(o) + "'s usage " +
                 render_usage(b.type.usage),
             o, b.type.usage);
      results.push_back(check(theta, omega, scrutinee.env.with_usage(o, *next), arms[l]->body, hint));
    }
    return join(results, "Case", e->span);
  }

  /// getValue: what the parameter stands for while checking the body.
  static ExprPtr argument_value(const ExprPtr& arg, const ValueType& t) {
    switch (t.kind) {
      case ValueType::Kind::Object:
        return make_expr(Expr::ObjRef{t.object.ref}, arg->span);
      case ValueType::Kind::Bot:
        return make_expr(Expr::Null{}, arg->span);
      case ValueType::Kind::Void:
        return make_expr(Expr::Unit{}, arg->span);
      default:
        break;
    }
    if (is_value(*arg)) return arg;
    switch (t.kind) {
      case ValueType::Kind::Bool:
        return make_expr(Expr::Placeholder{BaseKind::Bool, {}}, arg->span);
      case ValueType::Kind::Float:
        return make_expr(Expr::Placeholder{BaseKind::Float, {}}, arg->span);
      default:
        return make_expr(Expr::Placeholder{BaseKind::Enum, t.enum_name}, arg->span);
    }
  }

  CheckResult check_call(const RecEnv& theta, const LabelEnv& omega, const TypeEnv& env,
                         const ExprPtr& e, const Expr::Call& c, bool hint) {
    const bool indirect = c.receiver.field.has_value();
    const std::string rule = indirect ? "Call-ind" : "Call-d";
    ObjectId holder = target_object(c.receiver, e->span, rule.c_str());

    CheckResult arg = check(theta, omega, env, c.arg, false);
    require_done(arg, c.arg->span, "a method argument");
    const TypeEnv& g2 = arg.env;

    ObjectId o = holder;
    if (indirect) {
      const ObjectBinding& hb = g2.at(holder);
      const FieldType* z = hb.fields.find(*c.receiver.field);
      if (!z)
        fail("UnknownField", rule, e->span,
             "class " + hb.type.class_name + " has no field '" + *c.receiver.field + "'", holder);
      if (z->kind == FieldType::Kind::Bot)
        fail("NullReceiver", rule, e->span,
             "field '" + *c.receiver.field + "' of " + to_string(holder) +
                 " is null when calling " + c.method,
             holder);
      if (z->kind != FieldType::Kind::Reference)
        fail("NotAnObject", rule, e->span,
             "field '" + *c.receiver.field + "' does not hold an object", holder);
      o = z->target;
    }

    const ObjectBinding& b = g2.at(o);
    const ClassDecl& cls = class_of(g2, o, e->span);
    const MethodDecl* method = cls.find_method(c.method);
    if (!method)
      fail("UnknownMethod", rule, e->span, "class " + cls.name + " has no method '" + c.method + "'", o);
    if (!agree(method->param_type, arg.type))
      fail("ArgumentMismatch", rule, c.arg->span,
           "argument of " + cls.name + "." + c.method + " has type " +
               render_value_type(arg.type) + ", expected " + render_type(method->param_type),
           o);
    auto next = usage_step(b.type.usage, UsageAction::method(c.method));
    if (!next)
      fail("MethodNotAvailable", rule, e->span,
           "method " + c.method + " is not available on " + to_string(o) + " (" + cls.name +
               ") with usage " + render_usage(b.type.usage),
           o, b.type.usage);
    TypeEnv g3 = g2.with_usage(o, *next);

    auto key = std::make_pair(o, c.method);
    RecEnv inner = theta;
    if (auto it = theta.find(key); it != theta.end()) {
      ++base_case_count_;
      bool forget = options_.forget_snapshot_at && *options_.forget_snapshot_at == base_case_count_;
      if (!forget) {
        record(indirect ? "Call-ind-rec" : "Call-d-rec", e->span, env);
        if (!env_equal(it->second, g3))
          fail("RecursiveEnvMismatch", rule + "-rec", e->span,
               "recursive call of " + c.method + " on " + to_string(o) +
                   " in a different environment: " + describe_difference(it->second, g3),
               o, b.type.usage);
        ++stats.base_cases;
        return CheckResult::pending_result();
      }
      ++stats.forgotten;
      inner.erase(key);
    }

    record(rule.c_str(), e->span, env);
    ++stats.expansions[CallSite{e->span, o, c.method}];
    inner.insert_or_assign(key, g3);
    ExprPtr body = substitute_param(substitute_this(method->body, o), argument_value(c.arg, arg.type));
    CheckResult result = check(inner, omega, g3, body, hint);
    if (result.pending) return result;
    // A void method discards the value of its body.
    if (method->return_type.kind == TypeAnnot::Kind::Void) {
      result.type = ValueType::void_type();
      return result;
    }
    if (!returns(method->return_type, result.type))
      fail("ReturnMismatch", rule, e->span,
           cls.name + "." + c.method + " returns " + render_value_type(result.type) +
               ", declared " + render_type(method->return_type),
           o);
    return result;
  }

  static CheckResult join(const std::vector<CheckResult>& results, const char* rule, SourceSpan span) {
    const CheckResult* first = nullptr;
    for (const auto& r : results) {
      if (r.pending) continue;
      if (!first) {
        first = &r;
        continue;
      }
      if (!same_value_type(first->type, r.type))
        fail("BranchMismatch", rule, span,
             "branches have types " + render_value_type(first->type) + " and " +
                 render_value_type(r.type));
      if (!env_equal(first->env, r.env))
        fail("BranchMismatch", rule, span,
             "branches end in different environments: " + describe_difference(first->env, r.env));
    }
    return first ? *first : CheckResult::pending_result();
  }

  static std::string describe_difference(const TypeEnv& a, const TypeEnv& b) {
    for (const auto& [o, ba] : a) {
      const ObjectBinding* bb = b.find(o);
      if (!bb) return to_string(o) + " exists only on one side";
      if (!bisimilar(ba->type.usage, bb->type.usage))
        return to_string(o) + " has usage " + render_usage(ba->type.usage) + " vs " +
               render_usage(bb->type.usage);
      if (!(ba->fields == bb->fields)) {
        for (const auto& [f, z] : ba->fields.entries()) {
          const FieldType* other = bb->fields.find(f);
          if (!other || !(*other == z))
            return to_string(o) + "." + f + " is " + render_field_type(z) + " vs " +
                   (other ? render_field_type(*other) : std::string("missing"));
        }
      }
    }
    for (const auto& [o, bb] : b)
      if (!a.find(o)) return to_string(o) + " exists only on one side";
    return "classes differ";
  }

  const Program& program_;
  const CheckOptions& options_;
  std::size_t base_case_count_ = 0;
};

}  // namespace

const std::vector<std::string>& typing_rule_names() {
  static const std::vector<std::string> names = {
      "Main", "Assign",     "Field",        "New",  "Unit", "Bool",     "Enum",
      "Null", "Const",      "Obj",          "Call-d", "Call-d-rec", "Call-ind", "Call-ind-rec",
      "If",   "Comp",       "Label",        "Continue", "Case"};
  return names;
}

TypeEnv initial_env(const Program& program) {
  return TypeEnv{}.with_object(
      {{kMainObject, program.main.name, usage_end()}, init_types(program.main.fields)});
}

Outcome<ExprCheck> check_expr(const Program& program, const RecEnv& theta, const LabelEnv& omega,
                              const TypeEnv& env, const ExprPtr& e, bool link_hint,
                              const CheckOptions& options) {
  Checker checker(program, options);
  try {
    CheckResult r = checker.check(theta, omega, env, e, link_hint);
    return Outcome<ExprCheck>::success({std::move(r), std::move(checker.trace), std::move(checker.stats)});
  } catch (const TypeError& err) {
    return Outcome<ExprCheck>::failure({err.diag});
  } catch (const TypestateError& err) {
    Diagnostic d;
    d.kind = err.kind();
    d.rule = "internal";
    d.span = e->span;
    d.message = err.what();
    return Outcome<ExprCheck>::failure({std::move(d)});
  }
}

Outcome<CheckReport> check_program(const Program& program, const CheckOptions& options) {
  const MethodDecl* main = program.main.find_method(kMainMethod);
  if (!main) {
    Diagnostic d;
    d.kind = "MissingMain";
    d.rule = "Main";
    d.message = "program has no main method";
    return Outcome<CheckReport>::failure({std::move(d)});
  }
  TypeEnv g0 = initial_env(program);
  ExprPtr body = substitute_param(substitute_this(main->body, kMainObject),
                                  make_expr(Expr::Unit{}, main->span));
  auto checked = check_expr(program, {}, {}, g0, body, false, options);
  if (!checked) return Outcome<CheckReport>::failure(std::move(checked.diagnostics));

  CheckReport report;
  if (options.trace) report.trace.push_back({"Main", main->span, env_hash(g0)});
  report.trace.insert(report.trace.end(), checked->trace.begin(), checked->trace.end());
  report.stats = std::move(checked->stats);
  if (checked->result.pending) {
    Diagnostic d;
    d.kind = "RecursionNotInTail";
    d.rule = "Main";
    d.span = main->span;
    d.message = "main body ends in an unresolved recursive call or continue";
    return Outcome<CheckReport>::failure({std::move(d)});
  }
  report.type = checked->result.type;
  report.final_env = checked->result.env;

  std::vector<Diagnostic> unfinished;
  for (const auto& [o, b] : report.final_env) {
    if (terminated(b->type.usage)) continue;
    Diagnostic d;
    d.kind = "UnfinishedProtocol";
    d.rule = "Main";
    d.span = main->span;
    d.message = "object " + to_string(o) + " (" + b->type.class_name +
                ") has not finished its protocol; remaining usage " +
                render_usage(b->type.usage);
    d.object = to_string(o);
    d.usage = render_usage(b->type.usage);
    unfinished.push_back(std::move(d));
  }
  if (!unfinished.empty()) return Outcome<CheckReport>::failure(std::move(unfinished));
  return Outcome<CheckReport>::success(std::move(report));
}

std::string explain(const Diagnostic& diag) {
  std::string out = diag.kind.empty() ? std::string("error") : diag.kind;
  if (!diag.rule.empty()) out += " (rule " + diag.rule + ")";
  out += ": " + diag.message;
  if (diag.object) {
    out += "\n  object: " + *diag.object;
    if (diag.usage) out += "\n  current usage: " + *diag.usage;
  }
  return out;
}

}  // namespace typestate
