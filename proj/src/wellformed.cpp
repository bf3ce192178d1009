// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#include "typestate/wellformed.hpp"

#include <algorithm>

#include "overloaded.hpp"

namespace typestate {

namespace {

Diagnostic ill_formed(const char* rule, SourceSpan span, std::string message) {
  Diagnostic d;
  d.kind = "IllFormed";
  d.rule = rule;
  d.span = span;
  d.message = std::move(message);
  return d;
}

/// Every way out of `e` is a continue.
bool always_continues(const ExprPtr& e) {
  return std::visit(detail::Overloaded{
                        [](const Expr::Continue&) { return true; },
                        [](const Expr::Seq& s) { return always_continues(s.second); },
                        [](const Expr::If& i) {
                          return always_continues(i.then_branch) &&
                                 always_continues(i.else_branch);
                        },
                        [](const Expr::Match& m) {
                          if (m.arms.empty()) return false;
                          for (const auto& arm : m.arms)
                            if (!always_continues(arm.body)) return false;
                          return true;
                        },
                        [](const Expr::Labelled& l) { return always_continues(l.body); },
                        [](const auto&) { return false; },
                    },
                    e->node);
}

class LoopChecker {
 public:
  explicit LoopChecker(std::vector<Diagnostic>& out) : out_(out) {}

  void run(const ExprPtr& e) { walk(e, Frames{}); }

 private:
  struct Frame {
    std::string label;
    bool tail;
    bool guarded;
  };
  using Frames = std::vector<Frame>;

  static Frames non_tail(Frames f) {
    for (auto& fr : f) fr.tail = false;
    return f;
  }
  static Frames branch(Frames f) {
    for (auto& fr : f) fr.guarded = true;
    return f;
  }

  void walk(const ExprPtr& e, const Frames& frames) {
    std::visit(
        detail::Overloaded{
            [&](const Expr::Seq& s) {
              walk(s.first, non_tail(frames));
              walk(s.second, frames);
            },
            [&](const Expr::If& i) {
              walk(i.cond, non_tail(frames));
              walk(i.then_branch, branch(frames));
              walk(i.else_branch, branch(frames));
            },
            [&](const Expr::Match& m) {
              walk(m.scrutinee, non_tail(frames));
              for (const auto& arm : m.arms) walk(arm.body, branch(frames));
            },
            [&](const Expr::Labelled& l) {
              if (always_continues(l.body))
                out_.push_back(ill_formed("wf-4", e->span,
                                          "every branch of loop '" + l.label +
                                              "' ends in a continue"));
              Frames inner = frames;
              inner.push_back({l.label, true, false});
              walk(l.body, inner);
            },
            [&](const Expr::Continue& c) {
              auto it = std::find_if(frames.rbegin(), frames.rend(),
                                     [&](const Frame& f) { return f.label == c.label; });
              if (it == frames.rend()) {
                out_.push_back(ill_formed("wf-2", e->span,
                                          "continue refers to unknown loop '" + c.label + "'"));
                return;
              }
              if (!it->tail)
                out_.push_back(ill_formed("wf-1", e->span,
                                          "an expression follows 'continue " + c.label + "'"));
              if (!it->guarded)
                out_.push_back(ill_formed("wf-3", e->span,
                                          "'continue " + c.label +
                                              "' is not guarded by an if or match"));
            },
            [&](const Expr::FieldAssign& a) { walk(a.value, non_tail(frames)); },
            [&](const Expr::Call& c) { walk(c.arg, non_tail(frames)); },
            [&](const Expr::FloatMul& m) {
              walk(m.lhs, non_tail(frames));
              walk(m.rhs, non_tail(frames));
            },
            [&](const Expr::FloatAdd& a) {
              walk(a.lhs, non_tail(frames));
              walk(a.rhs, non_tail(frames));
            },
            [](const auto&) {},
        },
        e->node);
  }

  std::vector<Diagnostic>& out_;
};

void check_recursion(const ExprPtr& e, const MethodDecl& m, bool guarded,
                     std::vector<Diagnostic>& out) {
  std::visit(detail::Overloaded{
                 [&](const Expr::Call& c) {
                   if (!guarded && c.method == m.name && c.receiver.kind == Ref::Kind::This &&
                       !c.receiver.field)
                     out.push_back(ill_formed("wf-rec", e->span,
                                              "recursive call of '" + m.name +
                                                  "' is not guarded by an if or match"));
                   check_recursion(c.arg, m, guarded, out);
                 },
                 [&](const Expr::If& i) {
                   check_recursion(i.cond, m, guarded, out);
                   check_recursion(i.then_branch, m, true, out);
                   check_recursion(i.else_branch, m, true, out);
                 },
                 [&](const Expr::Match& mt) {
                   check_recursion(mt.scrutinee, m, guarded, out);
                   for (const auto& arm : mt.arms) check_recursion(arm.body, m, true, out);
                 },
                 [&](const Expr::Seq& s) {
                   check_recursion(s.first, m, guarded, out);
                   check_recursion(s.second, m, guarded, out);
                 },
                 [&](const Expr::FieldAssign& a) { check_recursion(a.value, m, guarded, out); },
                 [&](const Expr::Labelled& l) { check_recursion(l.body, m, guarded, out); },
                 [&](const Expr::FloatMul& f) {
                   check_recursion(f.lhs, m, guarded, out);
                   check_recursion(f.rhs, m, guarded, out);
                 },
                 [&](const Expr::FloatAdd& f) {
                   check_recursion(f.lhs, m, guarded, out);
                   check_recursion(f.rhs, m, guarded, out);
                 },
                 [](const auto&) {},
             },
             e->node);
}

}  // namespace

std::vector<Diagnostic> well_formed_expr(const ExprPtr& e) {
  std::vector<Diagnostic> out;
  LoopChecker(out).run(e);
  return out;
}

std::vector<Diagnostic> well_formed_method(const MethodDecl& m, const ClassDecl& enclosing) {
  (void)enclosing;
  std::vector<Diagnostic> out = well_formed_expr(m.body);
  check_recursion(m.body, m, false, out);
  return out;
}

std::vector<Diagnostic> well_formed_program(const Program& program) {
  std::vector<Diagnostic> out;
  auto check_class = [&](const ClassDecl& cls) {
    for (const auto& m : cls.methods) {
      auto diags = well_formed_method(m, cls);
      out.insert(out.end(), diags.begin(), diags.end());
    }
  };
  for (const auto& decl : program.decls)
    if (const auto* c = std::get_if<ClassDecl>(&decl)) check_class(*c);
  check_class(program.main);
  return out;
}

}  // namespace typestate
