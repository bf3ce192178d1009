// Part of the typestate project, under the Apache License v2.0.
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support.hpp"
#include "typestate/parser.hpp"
#include "typestate/usage_lts.hpp"

using namespace typestate;

namespace {

UsagePtr U(const char* text) {
  auto u = parse_usage(text);
  REQUIRE_MESSAGE(u, text);
  return *u;
}

UsageAction M(const char* m) { return UsageAction::method(m); }
UsageAction L(const char* l) { return UsageAction::label(l); }

}  // namespace

TEST_CASE("parse_usage builds the expected terms") {
  UsagePtr bank = U("{setMoney; {applyInterest; {getMoney; end}}}");
  const auto* b = bank->as<Usage::Branch>();
  REQUIRE(b);
  REQUIRE(b->arms.size() == 1);
  CHECK(b->arms[0].name == "setMoney");
  CHECK(render_usage(bank) == "{setMoney; {applyInterest; {getMoney; end}}}");

  CHECK(U("end")->is<Usage::End>());

  UsagePtr rec = U("rec X. {m; X}");
  CHECK(structurally_equal(rec, usage_rec("X", usage_branch({{"m", usage_var("X")}}))));
}

TEST_CASE("parse_usage rejects malformed and non-contractive usages") {
  CHECK_FALSE(parse_usage("{m; "));
  CHECK_FALSE(parse_usage("rec X.X"));
  CHECK_FALSE(parse_usage("{m; <a: end>"));
}

TEST_CASE("rendered usages parse back to the same term") {
  for (const auto& u : testing::enumerate_usages(3)) {
    auto again = parse_usage(render_usage(u));
    REQUIRE(again);
    CHECK(structurally_equal(*again, u));
  }
}

TEST_CASE("usage_step") {
  auto next = usage_step(U("{setMoney; {applyInterest; {getMoney; end}}}"), M("setMoney"));
  REQUIRE(next);
  CHECK(render_usage(*next) == "{applyInterest; {getMoney; end}}");

  CHECK_FALSE(usage_step(usage_end(), M("m")));

  UsagePtr rec = U("rec X.{m; X}");
  auto stepped = usage_step(rec, M("m"));
  REQUIRE(stepped);
  CHECK(bisimilar(*stepped, U("{m; rec X.{m; X}}")));
  CHECK(structurally_equal(*stepped, rec));

  SUBCASE("a method before a choice yields the choice") {
    auto c = usage_step(U("{m; <tt: end, ff: {n; end}>}"), M("m"));
    REQUIRE(c);
    CHECK((*c)->is<Usage::Choice>());
    auto ff = usage_step(*c, L("ff"));
    REQUIRE(ff);
    CHECK(render_usage(*ff) == "{n; end}");
    CHECK_FALSE(usage_step(*c, M("n")));
  }

  SUBCASE("open usages are a precondition violation") {
    CHECK_THROWS_AS(usage_step(usage_var("X"), M("m")), TypestateError);
  }
}

TEST_CASE("available") {
  CHECK(available(U("{m1; end, m2; end}")) == std::set<UsageAction>{M("m1"), M("m2")});
  CHECK(available(usage_end()).empty());
  CHECK(available(U("rec X.{m; X}")) == std::set<UsageAction>{M("m")});
}

TEST_CASE("unfold") {
  CHECK(structurally_equal(unfold(U("rec X.{m; X}")), U("{m; rec X.{m; X}}")));
  CHECK(unfold(usage_end())->is<Usage::End>());
  CHECK(structurally_equal(unfold(U("rec X. rec Y. {m; X}")),
                           U("rec Y. {m; rec X. rec Y. {m; X}}")));
  CHECK_THROWS_AS(unfold(usage_rec("X", usage_var("X"))), TypestateError);
}

TEST_CASE("bisimilar") {
  CHECK(bisimilar(U("rec X.{m; X}"), U("{m; rec X.{m; X}}")));
  CHECK_FALSE(bisimilar(U("{m; end}"), U("{m; end, n; end}")));
  CHECK(bisimilar(usage_end(), U("rec X.end")));
  CHECK(bisimilar(U("rec X.{m; {m; X}}"), U("rec Y.{m; Y}")));
  CHECK_FALSE(bisimilar(U("{m; <a: end, b: end>}"), U("{m; <a: end>}")));
  // A choice and a branch offering the same name are different actions.
  CHECK_FALSE(bisimilar(U("{m; <a: end>}"), U("{m; {a; end}}")));
}

TEST_CASE("terminated") {
  CHECK(terminated(usage_end()));
  CHECK_FALSE(terminated(U("{m; end}")));
  CHECK(terminated(U("rec X.end")));
}

TEST_CASE("the oracle agrees on a small depth") {
  auto report = testing::run_usage_oracle(3);
  CHECK(report.usages > 50);
  for (const auto& f : report.failures) FAIL_CHECK(f);
}
