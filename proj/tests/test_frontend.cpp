// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "support.hpp"
#include "typestate/desugar.hpp"
#include "typestate/frontend.hpp"
#include "typestate/parser.hpp"
#include "typestate/printer.hpp"
#include "typestate/wellformed.hpp"

using namespace typestate;
using typestate::testing::corpus_dir;
using typestate::testing::read_text;

namespace {

ExprPtr E(const char* text) {
  auto e = parse_expression(text);
  REQUIRE_MESSAGE(e, text);
  return *e;
}

std::string first_kind(const std::vector<Diagnostic>& diags) {
  return diags.empty() ? "" : diags.front().kind;
}

std::string compile_error(const std::string& text) {
  auto p = compile(text);
  return p ? "" : first_kind(p.diagnostics);
}

bool has_rule(const std::vector<Diagnostic>& diags, const std::string& rule) {
  for (const auto& d : diags)
    if (d.rule == rule) return true;
  return false;
}

}  // namespace

TEST_CASE("parse: the BankAccount listings") {
  auto p = parse(read_text(corpus_dir() / "bankaccount.pap"));
  REQUIRE(p);
  CHECK(p->decls.size() == 3);
  CHECK(p->main.fields.size() == 3);
}

TEST_CASE("parse: an empty class") {
  auto p = parse("class C[end] {} main { unit }");
  REQUIRE(p);
  REQUIRE(p->decls.size() == 1);
  const auto& c = std::get<SurfaceClass>(p->decls[0]);
  CHECK(c.name == "C");
  CHECK(c.usage->is<Usage::End>());
  CHECK(c.fields.empty());
  CHECK(c.methods.empty());
}

TEST_CASE("parse: syntax errors point into the input") {
  const std::string text = "class C[{m; ] {}";
  auto p = parse(text);
  REQUIRE_FALSE(p);
  const Diagnostic& d = p.diagnostics.front();
  CHECK(d.kind == "SyntaxError");
  CHECK(d.span.line == 1);
  CHECK(d.span.column == text.find(']') + 1);
  CHECK(d.span.begin <= text.size());

  auto missing_main = parse("class C[end] {}");
  REQUIRE_FALSE(missing_main);
  CHECK(missing_main.diagnostics.front().message.find("main") != std::string::npos);
}

TEST_CASE("parse: operator precedence and sequencing") {
  CHECK(print_expr(E("1.0 + 2.0 * 3.0")) == "1.0 + 2.0 * 3.0");
  auto sum = E("1.0 + 2.0 * 3.0");
  REQUIRE(sum->is<Expr::FloatAdd>());
  CHECK(sum->as<Expr::FloatAdd>()->rhs->is<Expr::FloatMul>());

  auto seq = E("unit; unit; unit");
  REQUIRE(seq->is<Expr::Seq>());
  CHECK(seq->as<Expr::Seq>()->second->is<Expr::Seq>());

  auto call = E("this.f.m()");
  REQUIRE(call->is<Expr::Call>());
  CHECK(call->as<Expr::Call>()->arg->is<Expr::Unit>());
}

TEST_CASE("desugar") {
  const char* text = R"(
    class BankAccount[{getMoney; {applyInterest; end}}] {
      val amount: float;
      fun getMoney(): float { this.amount }
      fun applyInterest(rate: float) { amount = amount * rate }
    }
    main {
      val account: BankAccount;
      account = new BankAccount;
      account.getMoney();
      account.applyInterest(2.0)
    })";
  auto p = compile(text);
  REQUIRE(p);

  SUBCASE("bare fields become this-fields") {
    const MethodDecl* main = p->main.find_method(kMainMethod);
    REQUIRE(main);
    const auto* seq = main->body->as<Expr::Seq>();
    REQUIRE(seq);
    const auto* alloc = seq->first->as<Expr::FieldAssignNew>();
    REQUIRE(alloc);
    CHECK(alloc->target.kind == Ref::Kind::This);
    CHECK(alloc->field == "account");
    CHECK(alloc->class_name == "BankAccount");
  }

  SUBCASE("omitted return type and parameter") {
    const ClassDecl* cls = p->find_class("BankAccount");
    REQUIRE(cls);
    CHECK(cls->find_method("applyInterest")->return_type.kind == TypeAnnot::Kind::Void);
    const MethodDecl* get = cls->find_method("getMoney");
    CHECK(get->param_name == "_");
    CHECK(get->param_type.kind == TypeAnnot::Kind::Void);
  }

  SUBCASE("main becomes a class") {
    CHECK(p->main.name == kMainClass);
    CHECK(render_usage(p->main.usage) == "{main; end}");
    REQUIRE(p->main.methods.size() == 1);
    CHECK(p->main.methods[0].param_type.kind == TypeAnnot::Kind::Void);
  }

  SUBCASE("enum literals are owned by this") {
    auto q = compile("enum S { a, b } class C[{f; <a: end, b: end>}] { fun f(): S { #a } } main { unit }");
    REQUIRE(q);
    const auto* lit = q->find_class("C")->find_method("f")->body->as<Expr::EnumLit>();
    REQUIRE(lit);
    CHECK(lit->owner.kind == Ref::Kind::This);
    CHECK(lit->enum_name == "S");
  }
}

TEST_CASE("desugar and validation errors") {
  CHECK(compile_error("main { foo = 1.0 }") == "UnknownField");
  CHECK(compile_error("main { val a: Nope; unit }") == "UnknownType");
  CHECK(compile_error("class C[end] { val x: bool; val x: bool; } main { unit }") == "DuplicateName");
  CHECK(compile_error("class C[end] {} class C[end] {} main { unit }") == "DuplicateName");
  CHECK(compile_error("enum L { a, a } main { unit }") == "DuplicateName");
  CHECK(compile_error("class C[{m; end}] {} main { unit }") == "UnknownMethod");
  // A choice can only follow a method, so the grammar already rules this out.
  CHECK(compile_error("class C[<a: end>] {} main { unit }") == "SyntaxError");
  CHECK(compile_error("class C[X] {} main { unit }") == "OpenUsage");
  CHECK(compile_error("class C[end] { fun m(x: bool): void { x = true } } main { unit }") ==
        "InvalidAssignment");
}

TEST_CASE("well_formed_expr") {
  auto after_continue = well_formed_expr(E("label k { if (true) { continue k; this.m(unit) } else { unit } }"));
  CHECK(has_rule(after_continue, "wf-1"));

  CHECK(well_formed_expr(E("label k { if (true) { continue k } else { unit } }")).empty());

  CHECK(has_rule(well_formed_expr(E("label k { continue k }")), "wf-4"));
  CHECK(has_rule(well_formed_expr(E("continue k")), "wf-2"));
  CHECK(has_rule(well_formed_expr(E("label k { unit; continue k }")), "wf-3"));
  CHECK(has_rule(well_formed_expr(E("label k { if (true) { this.m(continue k) } else { unit } }")),
                 "wf-1"));

  SUBCASE("idempotent and insensitive to spans") {
    ExprPtr e = E("label k { if (true) { continue k; unit } else { unit } }");
    auto once = well_formed_expr(e);
    auto twice = well_formed_expr(e);
    REQUIRE(once.size() == twice.size());
    auto respaced = E("label   k {\n if (true) {\n continue k;\n unit } else { unit } }");
    CHECK(well_formed_expr(respaced).size() == once.size());
  }

  SUBCASE("unfolding preserves clauses 2 to 4") {
    ExprPtr loop = E("label k { if (true) { continue k } else { unit } }");
    ExprPtr unfolded = substitute_continue(loop->as<Expr::Labelled>()->body, "k", loop);
    for (const auto& d : well_formed_expr(unfolded)) {
      CHECK(d.rule != "wf-2");
      CHECK(d.rule != "wf-3");
      CHECK(d.rule != "wf-4");
    }
  }
}

TEST_CASE("well_formed_method") {
  auto p = compile(read_text(corpus_dir() / "bankaccount.pap"));
  REQUIRE(p);
  const ClassDecl* bank = p->find_class("BankAccount");
  CHECK(well_formed_method(*bank->find_method("setMoney"), *bank).empty());

  ClassDecl cls;
  cls.name = "C";
  MethodDecl m;
  m.name = "m";
  m.param_name = "x";
  m.body = E("this.m(unit)");
  CHECK(has_rule(well_formed_method(m, cls), "wf-rec"));

  m.body = E("if (this.flag()) { this.m(unit) } else { unit }");
  CHECK(well_formed_method(m, cls).empty());
}

TEST_CASE("source programs contain no object references") {
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() != ".pap") continue;
    auto p = compile(read_text(entry.path()));
    REQUIRE(p);
    for (const auto& d : p->decls)
      if (const auto* c = std::get_if<ClassDecl>(&d))
        for (const auto& m : c->methods) CHECK_FALSE(contains_object_reference(m.body));
    CHECK_FALSE(contains_object_reference(p->main.methods[0].body));
  }
}

TEST_CASE("printing is a fixed point after one round trip") {
  for (const auto& entry : std::filesystem::directory_iterator(corpus_dir())) {
    if (entry.path().extension() != ".pap") continue;
    CAPTURE(entry.path().filename().string());
    auto first = parse(read_text(entry.path()));
    REQUIRE(first);
    const std::string printed = print_program(*first);
    auto second = parse(printed);
    REQUIRE(second);
    CHECK(print_program(*second) == printed);
  }
}

TEST_CASE("format_float") {
  CHECK(format_float(105.0) == "105.0");
  CHECK(format_float(0.25) == "0.25");
  CHECK(format_float(1.05) == "1.05");
}
