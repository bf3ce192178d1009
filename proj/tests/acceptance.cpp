// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"
#include "typestate/frontend.hpp"

using namespace typestate;
using namespace typestate::testing;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

Verdict bankaccount_accept() {
  auto t0 = Clock::now();
  Program p = load_program(corpus_dir() / "bankaccount.pap");
  auto report = check_program(p);
  const double elapsed = seconds_since(t0);
  if (!report) return {false, "rejected: " + report.diagnostics.front().message};
  const std::string want =
      "o0 ↦ (Main[end], {account ↦ o1, manager ↦ o2, db ↦ o3})\n"
      "o1 ↦ (BankAccount[end], {amount ↦ float})\n"
      "o2 ↦ (SalaryManager[end], {account ↦ o1})\n"
      "o3 ↦ (DataStorage[end], {account ↦ o1})";
  const std::string got = render_env(report->final_env);
  std::ostringstream d;
  d << "term=" << term(report->final_env) << " " << elapsed << "s";
  if (got != want) return {false, "final environment differs:\n" + got};
  return {term(report->final_env) && elapsed < 1.0, d.str()};
}

Verdict bankaccount_reject() {
  Program p = load_program(corpus_dir() / "bankaccount_swapped.pap");
  auto report = check_program(p);
  if (report) return {false, "accepted"};
  const Diagnostic& d = report.diagnostics.front();
  const bool ok = d.kind == "MethodNotAvailable" && d.object == std::optional<std::string>("o1") &&
                  d.message.find("getMoney") != std::string::npos;
  return {ok, d.kind + " on " + d.object.value_or("?") + ": " + d.message};
}

Verdict execution_oracle() {
  Program p = load_program(corpus_dir() / "bankaccount.pap");
  RunResult r = run(p);
  if (r.error) return {false, r.error->kind + ": " + r.error->message};
  // Hand simulation: main allocates account o1, manager o2, db o3; the two
  // setAccount calls precede the labels of line 48 onwards.
  const std::vector<EnvLabel> want = {
      EnvLabel::method(ObjectId{2}, "setAccount"), EnvLabel::method(ObjectId{3}, "setAccount"),
      EnvLabel::method(ObjectId{2}, "addSalary"), EnvLabel::method(ObjectId{1}, "setMoney"),
      EnvLabel::method(ObjectId{1}, "applyInterest"), EnvLabel::method(ObjectId{3}, "store"),
      EnvLabel::method(ObjectId{1}, "getMoney")};
  std::vector<EnvLabel> got;
  for (const auto& t : r.trace)
    if (t.label.kind != EnvLabel::Kind::Eps) got.push_back(t.label);
  const HeapObject* acc = r.final.heap.find(ObjectId{1});
  const auto* amount = acc ? (*acc->find("amount"))->as<Expr::FloatLit>() : nullptr;
  const double expected = 100.0 * 1.05;
  const bool amount_ok = amount && std::fabs(amount->value - expected) <= 1e-6;
  std::ostringstream d;
  d << "amount=" << (amount ? amount->value : -1.0) << " completed=" << r.completed;
  return {got == want && amount_ok && r.completed, d.str()};
}

std::vector<CorpusEntry> well_typed_corpus() {
  std::vector<CorpusEntry> out;
  for (auto& e : load_corpus())
    if (e.well_typed) out.push_back(e);
  return out;
}

Verdict subject_reduction() {
  auto t0 = Clock::now();
  const auto corpus = well_typed_corpus();
  std::size_t steps = 0;
  std::vector<std::string> failures;
  for (const auto& e : corpus) {
    ReplayReport r = replay_subject_reduction(load_program(e.path));
    steps += r.steps;
    for (const auto& f : r.failures) failures.push_back(e.name + ": " + f);
  }
  const double elapsed = seconds_since(t0);
  std::ostringstream d;
  d << corpus.size() << " programs, " << steps << " steps, " << failures.size() << " failures, "
    << elapsed << "s";
  if (!failures.empty()) d << "; first: " << failures.front();
  return {corpus.size() >= 10 && failures.empty() && elapsed < 30.0, d.str()};
}

Verdict progress() {
  const auto corpus = well_typed_corpus();
  std::vector<std::string> bad;
  for (const auto& e : corpus) {
    RunResult r = run(load_program(e.path));
    if (!r.reached_value) bad.push_back(e.name + (r.error ? " " + r.error->kind : ""));
  }
  return {bad.empty(), std::to_string(corpus.size()) + " programs" +
                           (bad.empty() ? "" : ", stuck: " + bad.front())};
}

Verdict conformance() {
  const auto corpus = well_typed_corpus();
  std::size_t labels = 0;
  std::vector<std::string> bad;
  for (const auto& e : corpus) {
    RunResult r = run(load_program(e.path));
    for (const auto& t : r.trace) labels += t.label.kind != EnvLabel::Kind::Eps;
    if (r.error && r.error->kind == "MonitorViolation") bad.push_back(e.name + " violation");
    if (r.reached_value && !check_completion(r.monitor)) bad.push_back(e.name + " incomplete");
    if (!r.reached_value) bad.push_back(e.name + " did not finish");
  }
  return {bad.empty(), std::to_string(labels) + " labels monitored" +
                           (bad.empty() ? "" : ", " + bad.front())};
}

Verdict usage_oracle() {
  UsageOracleReport r = run_usage_oracle(4);
  std::ostringstream d;
  d << r.usages << " usages, " << r.pairs << " pairs (" << r.equivalent_pairs << " bisimilar)";
  if (!r.failures.empty()) d << "; first: " << r.failures.front();
  return {r.usages >= 1000 && r.failures.empty(), d.str()};
}

Verdict recursion() {
  std::vector<std::string> bad;
  std::size_t max_expansions = 0;
  for (const char* name : {"walker", "pingpong"}) {
    Program p = load_program(corpus_dir() / (std::string(name) + ".pap"));
    auto plain = check_program(p);
    if (!plain) {
      bad.push_back(std::string(name) + " rejected");
      continue;
    }
    if (plain->stats.base_cases == 0) bad.push_back(std::string(name) + " has no base case");
    for (const auto& [site, n] : plain->stats.expansions) max_expansions = std::max(max_expansions, n);
    CheckOptions forget;
    forget.forget_snapshot_at = 1;
    auto again = check_program(p, forget);
    if (!again || again->stats.forgotten != 1 ||
        !same_value_type(again->type, plain->type) ||
        !env_equal(again->final_env, plain->final_env))
      bad.push_back(std::string(name) + " differs after dropping a snapshot");
  }
  return {bad.empty() && max_expansions <= 2,
          "max expansions per site " + std::to_string(max_expansions) +
              (bad.empty() ? "" : ", " + bad.front())};
}

Verdict rule_coverage() {
  Coverage c = corpus_coverage(load_corpus());
  std::vector<std::string> missing;
  for (const auto& r : typing_rule_names())
    if (!c.typing.count(r)) missing.push_back(r);
  for (const auto& r : reduction_rule_names())
    if (!c.reduction.count(r)) missing.push_back(r);
  std::string d = std::to_string(typing_rule_names().size()) + " typing, " +
                  std::to_string(reduction_rule_names().size()) + " reduction rules";
  if (!missing.empty()) d += "; missing " + missing.front();
  return {missing.empty(), d};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"bankaccount-accept", bankaccount_accept},
      {"bankaccount-reject", bankaccount_reject},
      {"execution-oracle", execution_oracle},
      {"subject-reduction", subject_reduction},
      {"progress", progress},
      {"conformance-completion", conformance},
      {"usage-lts-oracle", usage_oracle},
      {"recursion-machinery", recursion},
      {"rule-coverage", rule_coverage},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Verdict o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << "  " << o.detail << "\n";
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
