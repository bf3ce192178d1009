// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/usage.hpp"

#include <algorithm>
#include <set>

#include "overloaded.hpp"

namespace typestate {

namespace {

using detail::Overloaded;

UsagePtr make(Usage::Node node) {
  return std::make_shared<const Usage>(Usage{std::move(node)});
}

void render_into(const UsagePtr& u, std::string& out);

void render_arms(const std::vector<Usage::Arm>& arms, std::string_view sep,
                 std::string& out) {
  for (std::size_t i = 0; i < arms.size(); ++i) {
    if (i > 0) out += ", ";
    out += arms[i].name;
    out += sep;
    render_into(arms[i].next, out);
  }
}

void render_into(const UsagePtr& u, std::string& out) {
  std::visit(Overloaded{
                 [&](const Usage::Branch& b) {
                   out += '{';
                   render_arms(b.arms, "; ", out);
                   out += '}';
                 },
                 [&](const Usage::Choice& c) {
                   out += '<';
                   render_arms(c.arms, ": ", out);
                   out += '>';
                 },
                 [&](const Usage::Rec& r) {
                   out += "rec ";
                   out += r.var;
                   out += '.';
                   render_into(r.body, out);
                 },
                 [&](const Usage::Var& v) { out += v.name; },
                 [&](const Usage::End&) { out += "end"; },
             },
             u->node);
}

void collect_free(const UsagePtr& u, std::vector<std::string>& bound,
                  std::set<std::string>& free) {
  std::visit(Overloaded{
                 [&](const Usage::Branch& b) {
                   for (const auto& arm : b.arms) collect_free(arm.next, bound, free);
                 },
                 [&](const Usage::Choice& c) {
                   for (const auto& arm : c.arms) collect_free(arm.next, bound, free);
                 },
                 [&](const Usage::Rec& r) {
                   bound.push_back(r.var);
                   collect_free(r.body, bound, free);
                   bound.pop_back();
                 },
                 [&](const Usage::Var& v) {
                   if (std::find(bound.begin(), bound.end(), v.name) == bound.end())
                     free.insert(v.name);
                 },
                 [&](const Usage::End&) {},
             },
             u->node);
}

bool arms_equal(const std::vector<Usage::Arm>& a, const std::vector<Usage::Arm>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name || !structurally_equal(a[i].next, b[i].next)) return false;
  }
  return true;
}

}  // namespace

UsagePtr usage_end() {
  static const UsagePtr end = make(Usage::End{});
  return end;
}
UsagePtr usage_var(std::string name) { return make(Usage::Var{std::move(name)}); }
UsagePtr usage_rec(std::string var, UsagePtr body) {
  return make(Usage::Rec{std::move(var), std::move(body)});
}
UsagePtr usage_branch(std::vector<Usage::Arm> arms) { return make(Usage::Branch{std::move(arms)}); }
UsagePtr usage_choice(std::vector<Usage::Arm> arms) { return make(Usage::Choice{std::move(arms)}); }

bool structurally_equal(const UsagePtr& a, const UsagePtr& b) {
  if (a == b) return true;
  if (!a || !b || a->node.index() != b->node.index()) return false;
  if (auto* x = a->as<Usage::Branch>()) return arms_equal(x->arms, b->as<Usage::Branch>()->arms);
  if (auto* x = a->as<Usage::Choice>()) return arms_equal(x->arms, b->as<Usage::Choice>()->arms);
  if (auto* x = a->as<Usage::Rec>()) {
    const auto* y = b->as<Usage::Rec>();
    return x->var == y->var && structurally_equal(x->body, y->body);
  }
  if (auto* x = a->as<Usage::Var>()) return x->name == b->as<Usage::Var>()->name;
  return true;  // End
}

std::string render_usage(const UsagePtr& u) {
  std::string out;
  render_into(u, out);
  return out;
}

std::vector<std::string> free_usage_vars(const UsagePtr& u) {
  std::vector<std::string> bound;
  std::set<std::string> free;
  collect_free(u, bound, free);
  return {free.begin(), free.end()};
}

bool is_closed(const UsagePtr& u) { return free_usage_vars(u).empty(); }

bool is_contractive(const UsagePtr& u) {
  // Strip a maximal chain of binders; the term under it must not be one of them.
  std::vector<std::string> chain;
  const Usage* cur = u.get();
  while (const auto* r = cur->as<Usage::Rec>()) {
    chain.push_back(r->var);
    cur = r->body.get();
  }
  if (const auto* v = cur->as<Usage::Var>()) {
    if (std::find(chain.begin(), chain.end(), v->name) != chain.end()) return false;
    return true;
  }
  const std::vector<Usage::Arm>* arms = nullptr;
  if (const auto* b = cur->as<Usage::Branch>()) arms = &b->arms;
  if (const auto* c = cur->as<Usage::Choice>()) arms = &c->arms;
  if (arms) {
    for (const auto& arm : *arms) {
      if (!is_contractive(arm.next)) return false;
    }
  }
  return true;
}

UsagePtr substitute_usage(const UsagePtr& u, const std::string& var,
                          const UsagePtr& replacement) {
  return std::visit(
      Overloaded{
          [&](const Usage::Branch& b) -> UsagePtr {
            std::vector<Usage::Arm> arms;
            arms.reserve(b.arms.size());
            for (const auto& arm : b.arms)
              arms.push_back({arm.name, substitute_usage(arm.next, var, replacement)});
            return usage_branch(std::move(arms));
          },
          [&](const Usage::Choice& c) -> UsagePtr {
            std::vector<Usage::Arm> arms;
            arms.reserve(c.arms.size());
            for (const auto& arm : c.arms)
              arms.push_back({arm.name, substitute_usage(arm.next, var, replacement)});
            return usage_choice(std::move(arms));
          },
          [&](const Usage::Rec& r) -> UsagePtr {
            if (r.var == var) return u;  // shadowed
            return usage_rec(r.var, substitute_usage(r.body, var, replacement));
          },
          [&](const Usage::Var& v) -> UsagePtr { return v.name == var ? replacement : u; },
          [&](const Usage::End&) -> UsagePtr { return u; },
      },
      u->node);
}

}  // namespace typestate
