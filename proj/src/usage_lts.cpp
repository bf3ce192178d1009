// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/usage_lts.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <unordered_map>
#include <vector>

#include "typestate/source.hpp"

namespace typestate {

namespace {

// Longest chain of `rec` binders unfold_head will strip before giving up.
constexpr int kMaxUnfoldChain = 4096;

void require_closed(const UsagePtr& u) {
  if (!is_closed(u))
    throw TypestateError("OpenUsage", "usage has free variables: " + render_usage(u));
}

const std::vector<Usage::Arm>* arms_of(const Usage& u) {
  if (const auto* b = u.as<Usage::Branch>()) return &b->arms;
  if (const auto* c = u.as<Usage::Choice>()) return &c->arms;
  return nullptr;
}

UsageAction::Kind action_kind(const Usage& u) {
  return u.is<Usage::Branch>() ? UsageAction::Kind::Method : UsageAction::Kind::Label;
}

std::optional<UsagePtr> step_closed(const UsagePtr& u, const UsageAction& a) {
  UsagePtr head = unfold_head(u);
  const auto* arms = arms_of(*head);
  if (!arms || action_kind(*head) != a.kind) return std::nullopt;
  for (const auto& arm : *arms) {
    if (arm.name == a.name) return arm.next;
  }
  return std::nullopt;
}

std::set<UsageAction> available_closed(const UsagePtr& u) {
  UsagePtr head = unfold_head(u);
  std::set<UsageAction> out;
  if (const auto* arms = arms_of(*head)) {
    for (const auto& arm : *arms) out.insert({action_kind(*head), arm.name});
  }
  return out;
}

/// The reachable state space of a set of usages, states identified by the
/// rendering of their unfolded form.
struct StateSpace {
  std::vector<UsagePtr> states;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::vector<std::pair<UsageAction, std::size_t>>> edges;

  std::size_t add(const UsagePtr& u, std::deque<std::size_t>& work) {
    UsagePtr head = unfold_head(u);
    auto key = render_usage(head);
    if (auto it = index.find(key); it != index.end()) return it->second;
    std::size_t id = states.size();
    states.push_back(head);
    edges.emplace_back();
    index.emplace(std::move(key), id);
    work.push_back(id);
    return id;
  }

  void explore(std::deque<std::size_t>& work) {
    while (!work.empty()) {
      std::size_t s = work.front();
      work.pop_front();
      const auto* arms = arms_of(*states[s]);
      if (!arms) continue;
      auto kind = action_kind(*states[s]);
      for (const auto& arm : *arms) {
        std::size_t t = add(arm.next, work);
        edges[s].push_back({UsageAction{kind, arm.name}, t});
      }
    }
  }
};

}  // namespace

std::string to_string(const UsageAction& a) {
  return a.kind == UsageAction::Kind::Method ? a.name : "#" + a.name;
}

UsagePtr unfold(const UsagePtr& u) {
  const auto* r = u->as<Usage::Rec>();
  if (!r) return u;
  if (const auto* v = r->body->as<Usage::Var>(); v && v->name == r->var)
    throw TypestateError("NonContractive", "non-contractive usage " + render_usage(u));
  return substitute_usage(r->body, r->var, u);
}

UsagePtr unfold_head(const UsagePtr& u) {
  UsagePtr cur = u;
  for (int i = 0; cur->is<Usage::Rec>(); ++i) {
    if (i == kMaxUnfoldChain)
      throw TypestateError("NonContractive", "non-contractive usage " + render_usage(u));
    cur = unfold(cur);
  }
  return cur;
}

std::optional<UsagePtr> usage_step(const UsagePtr& u, const UsageAction& a) {
  require_closed(u);
  return step_closed(u, a);
}

std::set<UsageAction> available(const UsagePtr& u) {
  require_closed(u);
  return available_closed(u);
}

bool terminated(const UsagePtr& u) { return available(u).empty(); }

bool bisimilar(const UsagePtr& a, const UsagePtr& b) {
  if (a == b || structurally_equal(a, b)) return true;
  require_closed(a);
  require_closed(b);

  StateSpace space;
  std::deque<std::size_t> work;
  std::size_t sa = space.add(a, work);
  std::size_t sb = space.add(b, work);
  space.explore(work);
  if (sa == sb) return true;

  // Partition refinement. The LTS is deterministic, so a state's signature is
  // its block together with the blocks reached under each action.
  const std::size_t n = space.states.size();
  std::vector<std::size_t> block(n, 0);
  std::size_t blocks = 1;
  while (true) {
    std::map<std::vector<std::pair<UsageAction, std::size_t>>, std::size_t> signatures;
    std::vector<std::size_t> next(n);
    for (std::size_t s = 0; s < n; ++s) {
      std::vector<std::pair<UsageAction, std::size_t>> sig;
      sig.push_back({UsageAction{}, block[s]});
      for (const auto& [act, t] : space.edges[s]) sig.push_back({act, block[t]});
      std::sort(sig.begin() + 1, sig.end());
      auto [it, inserted] = signatures.emplace(std::move(sig), signatures.size());
      next[s] = it->second;
    }
    block = std::move(next);
    if (signatures.size() == blocks) break;
    blocks = signatures.size();
  }
  return block[sa] == block[sb];
}

}  // namespace typestate
