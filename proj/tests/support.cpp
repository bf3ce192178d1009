// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "typestate/frontend.hpp"

#ifndef TYPESTATE_SOURCE_DIR
#error "TYPESTATE_SOURCE_DIR must be defined by the build"
#endif

namespace typestate::testing {

namespace fs = std::filesystem;

fs::path source_dir() { return fs::path(TYPESTATE_SOURCE_DIR); }
fs::path corpus_dir() { return source_dir() / "corpus"; }

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Program must_compile(const std::string& text) {
  auto p = compile(text);
  if (!p) {
    std::string msg = "program does not compile:";
    for (const auto& d : p.diagnostics) msg += "\n  " + format_diagnostic(d, "<input>");
    throw std::runtime_error(msg);
  }
  return std::move(*p);
}

Program load_program(const fs::path& path) { return must_compile(read_text(path)); }

std::vector<CorpusEntry> load_corpus(const fs::path& dir) {
  std::vector<CorpusEntry> out;
  for (const auto& f : fs::directory_iterator(dir)) {
    if (f.path().extension() != ".pap") continue;
    CorpusEntry e;
    e.name = f.path().stem().string();
    e.path = f.path();
    fs::path expect = f.path();
    expect.replace_extension(".expect");
    std::istringstream lines(read_text(expect));
    for (std::string line; std::getline(lines, line);) {
      if (line.empty() || line[0] == '#') continue;
      e.expectation = line;
      break;
    }
    auto program = compile(read_text(f.path()));
    e.well_typed = program && static_cast<bool>(check_program(*program));
    out.push_back(std::move(e));
  }
  std::sort(out.begin(), out.end(),
            [](const CorpusEntry& a, const CorpusEntry& b) { return a.name < b.name; });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

FieldType tag_of(const ExprPtr& v) {
  if (const auto* r = v->as<Expr::ObjRef>()) return FieldType::reference(r->object);
  if (v->is<Expr::Null>()) return FieldType::bot_tag();
  if (v->is<Expr::BoolLit>()) return FieldType::bool_tag();
  if (v->is<Expr::Unit>()) return FieldType::void_tag();
  if (v->is<Expr::FloatLit>()) return FieldType::float_tag();
  if (const auto* l = v->as<Expr::EnumLit>()) return FieldType::enum_tag(l->enum_name);
  throw std::runtime_error("written value is not a value");
}

/// The environment the typing-environment transition system should reach
/// after one reduction step.
TypeEnv replay(const Program& program, const TypeEnv& env, const StepResult& s) {
  if (s.label.kind != EnvLabel::Kind::Eps) {
    const ObjectBinding& b = env.at(s.label.object);
    UsageAction a = s.label.kind == EnvLabel::Kind::Method ? UsageAction::method(s.label.name)
                                                           : UsageAction::label(s.label.name);
    auto next = usage_step(b.type.usage, a);
    if (!next) throw std::runtime_error("usage has no " + render_label(s.label));
    return env.with_usage(s.label.object, *next);
  }
  if (s.allocated) {
    const HeapObject* obj = s.next.heap.find(*s.allocated);
    const ClassDecl* cls = program.find_class(obj->class_name);
    TypeEnv out = env.with_object(
        {ObjectType{*s.allocated, cls->name, cls->usage}, init_types(cls->fields)});
    return out.with_field(s.write->object, s.write->field, FieldType::reference(*s.allocated));
  }
  if (s.write) return env.with_field(s.write->object, s.write->field, tag_of(s.write->value));
  return env;
}

}  // namespace

ReplayReport replay_subject_reduction(const Program& program) {
  ReplayReport report;
  auto checked = check_program(program);
  if (!checked) {
    report.failures.push_back("program is not well typed");
    return report;
  }
  const TypeEnv final_env = checked->final_env;

  TypeEnv env = initial_env(program);
  Config initial = initial_config(program);
  if (!consistent(env, initial.heap)) report.failures.push_back("initial heap inconsistent");

  RunOptions options;
  options.on_step = [&](const Config&, const StepResult& s) {
    const std::size_t n = report.steps + 1;
    auto where = [&](const std::string& what) {
      return "step " + std::to_string(n) + " (" + s.rule + ", " + render_label(s.label) +
             "): " + what;
    };
    report.reduction_rules.insert(s.rule);
    if (s.in_context) report.reduction_rules.insert("ctx");

    TypeEnv next;
    try {
      next = replay(program, env, s);
    } catch (const std::exception& e) {
      report.failures.push_back(where(e.what()));
      ++report.steps;
      return;
    }
    if (!env_step_check(program, env, s.label, next))
      report.failures.push_back(where("no environment transition"));
    if (!consistent(next, s.next.heap)) report.failures.push_back(where("heap inconsistent"));

    auto residual = check_expr(program, {}, {}, next, s.next.expr);
    if (!residual) {
      report.failures.push_back(where("residual rejected: " + residual.diagnostics.front().message));
    } else if (residual->result.pending) {
      report.failures.push_back(where("residual is pending"));
    } else if (!env_equal(residual->result.env, final_env)) {
      report.failures.push_back(where("residual ends in a different environment"));
    }
    env = std::move(next);
    ++report.steps;
  };

  RunResult r = run(program, options);
  report.reached_value = r.reached_value;
  report.completed = r.completed;
  if (r.error) report.failures.push_back("run failed: " + r.error->kind + ": " + r.error->message);
  return report;
}

// ---------------------------------------------------------------------------
// Usage oracle. Deliberately shares nothing with usage.cpp / usage_lts.cpp
// beyond the term constructors.

namespace {

std::string show(const UsagePtr& u) {
  if (u->is<Usage::End>()) return "end";
  if (const auto* v = u->as<Usage::Var>()) return v->name;
  if (const auto* r = u->as<Usage::Rec>()) return "rec " + r->var + "." + show(r->body);
  const auto& arms = u->is<Usage::Branch>() ? u->as<Usage::Branch>()->arms
                                            : u->as<Usage::Choice>()->arms;
  std::string s = u->is<Usage::Branch>() ? "{" : "<";
  for (std::size_t i = 0; i < arms.size(); ++i)
    s += (i ? ", " : "") + arms[i].name + (u->is<Usage::Branch>() ? "; " : ": ") +
         show(arms[i].next);
  return s + (u->is<Usage::Branch>() ? "}" : ">");
}

UsagePtr subst(const UsagePtr& u, const std::string& x, const UsagePtr& by) {
  if (const auto* v = u->as<Usage::Var>()) return v->name == x ? by : u;
  if (const auto* r = u->as<Usage::Rec>())
    return r->var == x ? u : usage_rec(r->var, subst(r->body, x, by));
  auto map_arms = [&](const std::vector<Usage::Arm>& arms) {
    std::vector<Usage::Arm> out;
    for (const auto& a : arms) out.push_back({a.name, subst(a.next, x, by)});
    return out;
  };
  if (const auto* b = u->as<Usage::Branch>()) return usage_branch(map_arms(b->arms));
  if (const auto* c = u->as<Usage::Choice>()) return usage_choice(map_arms(c->arms));
  return u;
}

void gen(int height, std::vector<std::string>& vars, bool guarded, std::vector<UsagePtr>& out);

const std::vector<std::vector<std::string>> kSubsetsM = {{"m"}, {"n"}, {"m", "n"}};
const std::vector<std::vector<std::string>> kSubsetsL = {{"a"}, {"b"}, {"a", "b"}};

/// All ways to pick one element of `pool` per name.
void arms_product(const std::vector<std::string>& names, const std::vector<UsagePtr>& pool,
                  std::size_t i, std::vector<Usage::Arm>& acc,
                  std::vector<std::vector<Usage::Arm>>& out) {
  if (i == names.size()) {
    out.push_back(acc);
    return;
  }
  for (const auto& u : pool) {
    acc.push_back({names[i], u});
    arms_product(names, pool, i + 1, acc, out);
    acc.pop_back();
  }
}

void gen(int height, std::vector<std::string>& vars, bool guarded, std::vector<UsagePtr>& out) {
  if (height < 1) return;
  out.push_back(usage_end());
  if (guarded)
    for (const auto& v : vars) out.push_back(usage_var(v));
  if (height < 2) return;

  // Branch continuations: a usage of height-1, or a choice of height-1.
  std::vector<UsagePtr> conts;
  gen(height - 1, vars, true, conts);
  if (height >= 3) {
    std::vector<UsagePtr> inner;
    gen(height - 2, vars, true, inner);
    for (const auto& names : kSubsetsL) {
      std::vector<std::vector<Usage::Arm>> choices;
      std::vector<Usage::Arm> acc;
      arms_product(names, inner, 0, acc, choices);
      for (auto& arms : choices) conts.push_back(usage_choice(std::move(arms)));
    }
  }
  for (const auto& names : kSubsetsM) {
    std::vector<std::vector<Usage::Arm>> branches;
    std::vector<Usage::Arm> acc;
    arms_product(names, conts, 0, acc, branches);
    for (auto& arms : branches) out.push_back(usage_branch(std::move(arms)));
  }

  if (vars.size() < 2) {
    std::string x = vars.empty() ? "X" : "Y";
    vars.push_back(x);
    std::vector<UsagePtr> bodies;
    gen(height - 1, vars, false, bodies);
    vars.pop_back();
    for (auto& b : bodies) out.push_back(usage_rec(x, b));
  }
}

}  // namespace

std::vector<UsagePtr> enumerate_usages(int depth) {
  std::vector<UsagePtr> out;
  std::vector<std::string> vars;
  gen(depth, vars, false, out);
  return out;
}

std::optional<UsagePtr> oracle_step(const UsagePtr& u, const UsageAction& a) {
  if (const auto* r = u->as<Usage::Rec>()) return oracle_step(subst(r->body, r->var, u), a);
  if (const auto* b = u->as<Usage::Branch>(); b && a.kind == UsageAction::Kind::Method) {
    for (const auto& arm : b->arms)
      if (arm.name == a.name) return arm.next;
  }
  if (const auto* c = u->as<Usage::Choice>(); c && a.kind == UsageAction::Kind::Label) {
    for (const auto& arm : c->arms)
      if (arm.name == a.name) return arm.next;
  }
  return std::nullopt;
}

std::set<UsageAction> oracle_available(const UsagePtr& u) {
  std::set<UsageAction> out;
  for (const char* m : {"m", "n"})
    if (oracle_step(u, UsageAction::method(m))) out.insert(UsageAction::method(m));
  for (const char* l : {"a", "b"})
    if (oracle_step(u, UsageAction::label(l))) out.insert(UsageAction::label(l));
  return out;
}

bool oracle_equivalent(const UsagePtr& a, const UsagePtr& b) {
  std::set<std::pair<std::string, std::string>> seen;
  std::deque<std::pair<UsagePtr, UsagePtr>> work{{a, b}};
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    if (!seen.insert({show(x), show(y)}).second) continue;
    auto ax = oracle_available(x);
    if (ax != oracle_available(y)) return false;
    for (const auto& act : ax) work.emplace_back(*oracle_step(x, act), *oracle_step(y, act));
  }
  return true;
}

UsageOracleReport run_usage_oracle(int depth) {
  UsageOracleReport report;
  const std::vector<UsagePtr> all = enumerate_usages(depth);
  report.usages = all.size();
  auto fail = [&](const std::string& what, const UsagePtr& u) {
    if (report.failures.size() < 20) report.failures.push_back(what + ": " + show(u));
  };

  const std::vector<UsageAction> actions = {UsageAction::method("m"), UsageAction::method("n"),
                                            UsageAction::label("a"), UsageAction::label("b")};
  // Equivalence-class signature from the oracle, to pick interesting pairs.
  std::map<std::string, std::vector<std::size_t>> buckets;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const UsagePtr& u = all[i];
    const auto avail = available(u);
    if (avail != oracle_available(u)) fail("available differs", u);
    for (const auto& act : actions) {
      auto got = usage_step(u, act);
      auto want = oracle_step(u, act);
      if (got.has_value() != avail.count(act)) fail("step/available disagree on " + act.name, u);
      if (got.has_value() != want.has_value()) {
        fail("step presence differs on " + act.name, u);
      } else if (got && !structurally_equal(*got, *want)) {
        fail("step result differs on " + act.name, u);
      }
    }
    if (!bisimilar(u, u)) fail("not reflexive", u);
    if (u->is<Usage::Rec>() && !bisimilar(u, unfold(u))) fail("not bisimilar to unfolding", u);
    if (terminated(u) != avail.empty()) fail("terminated disagrees with available", u);

    std::string sig;
    for (const auto& act : avail) {
      sig += act.name + "(";
      for (const auto& act2 : oracle_available(*oracle_step(u, act))) sig += act2.name;
      sig += ")";
    }
    buckets[sig].push_back(i);
  }

  // Pairs inside a bucket are the likely-equivalent ones; add random pairs
  // across the whole set for the negative side.
  std::mt19937 rng(7);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [sig, members] : buckets) {
    std::vector<std::size_t> pick = members;
    std::shuffle(pick.begin(), pick.end(), rng);
    if (pick.size() > 40) pick.resize(40);
    for (std::size_t i = 0; i < pick.size(); ++i)
      for (std::size_t j = i + 1; j < pick.size(); ++j) pairs.emplace_back(pick[i], pick[j]);
  }
  std::uniform_int_distribution<std::size_t> any(0, all.size() - 1);
  for (int k = 0; k < 20000; ++k) pairs.emplace_back(any(rng), any(rng));

  for (const auto& [i, j] : pairs) {
    const bool lib = bisimilar(all[i], all[j]);
    if (lib && i != j) ++report.equivalent_pairs;
    if (lib != oracle_equivalent(all[i], all[j])) fail("bisimilar differs from oracle vs " + show(all[j]), all[i]);
    if (lib != bisimilar(all[j], all[i])) fail("not symmetric vs " + show(all[j]), all[i]);
    if (lib) {
      if (available(all[i]) != available(all[j])) fail("bisimilar but different actions", all[i]);
      for (const auto& act : available(all[i]))
        if (!bisimilar(*usage_step(all[i], act), *usage_step(all[j], act)))
          fail("successors not bisimilar on " + act.name, all[i]);
    }
  }
  report.pairs = pairs.size();

  // Transitivity on triples drawn from each bucket.
  for (const auto& [sig, members] : buckets) {
    const std::size_t n = std::min<std::size_t>(members.size(), 12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          const auto& x = all[members[i]];
          const auto& y = all[members[j]];
          const auto& z = all[members[k]];
          if (bisimilar(x, y) && bisimilar(y, z) && !bisimilar(x, z)) fail("not transitive", x);
        }
  }
  return report;
}

// ---------------------------------------------------------------------------

Coverage corpus_coverage(const std::vector<CorpusEntry>& corpus) {
  Coverage c;
  for (const auto& e : corpus) {
    if (!e.well_typed) continue;
    Program p = load_program(e.path);
    CheckOptions options;
    options.trace = true;
    auto report = check_program(p, options);
    for (const auto& ev : report->trace) c.typing.insert(ev.rule);
    RunOptions run_options;
    run_options.on_step = [&](const Config&, const StepResult& s) {
      c.reduction.insert(s.rule);
      if (s.in_context) c.reduction.insert("ctx");
    };
    run(p, run_options);
  }
  return c;
}

}  // namespace typestate::testing
