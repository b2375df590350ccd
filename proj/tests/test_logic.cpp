#include "doctest.h"
#include "interlock/logic.hpp"

using namespace interlock;

TEST_CASE("terms and atoms render canonically") {
  Atom a = make_atom("edge", {constant("h"), constant("next"), variable("Y")});
  CHECK(to_string(a) == "edge(h,next,Y)");
  CHECK(!a.ground());
  Atom b = make_atom("empty");
  CHECK(to_string(b) == "empty");
  CHECK(b.ground());
  CHECK(to_string(naf(a)) == "not edge(h,next,Y)");
}

TEST_CASE("rules render with bodies and constraints render headless") {
  Rule r;
  r.head = make_atom("reach", {variable("Y")});
  r.body = {pos(make_atom("reach", {variable("X")})),
            pos(make_atom("edge", {variable("X"), variable("Y")}))};
  CHECK(to_string(r) == "reach(Y) :- reach(X), edge(X,Y).");
  Rule c;
  c.body = {pos(make_atom("p")), naf(make_atom("q"))};
  CHECK(to_string(c) == ":- p, not q.");
}

TEST_CASE("substitution grounds atoms and rejects unbound variables") {
  Atom a = make_atom("key", {variable("X"), variable("K")});
  Binding b{{"X", constant("n1")}, {"K", constant("k1")}};
  CHECK(to_string(apply_substitution(a, b)) == "key(n1,k1)");
  Binding partial{{"X", constant("n1")}};
  CHECK_THROWS_AS(apply_substitution(a, partial), LogicError);
}

TEST_CASE("rename_apart suffixes every variable") {
  Rule r;
  r.head = make_atom("p", {variable("X")});
  r.body = {pos(make_atom("q", {variable("X"), variable("Y")}))};
  Rule renamed = rename_apart(r, "b1");
  CHECK(to_string(renamed) == "p(X_b1) :- q(X_b1,Y_b1).");
  CHECK(rule_variables(renamed) == std::set<std::string>{"X_b1", "Y_b1"});
}

TEST_CASE("safety requires positive occurrences for head and naf variables") {
  Rule safe;
  safe.head = make_atom("p", {variable("X")});
  safe.body = {pos(make_atom("q", {variable("X")})), naf(make_atom("r", {variable("X")}))};
  CHECK(is_safe(safe));

  Rule builtin_bound;
  builtin_bound.head = make_atom("p", {variable("K")});
  builtin_bound.body = {pos(make_atom("lt", {variable("K"), variable("K2")}))};
  CHECK(is_safe(builtin_bound));

  Rule head_unsafe;
  head_unsafe.head = make_atom("p", {variable("X")});
  head_unsafe.body = {pos(make_atom("q", {variable("Y")}))};
  CHECK(!is_safe(head_unsafe));

  Rule naf_unsafe;
  naf_unsafe.head = make_atom("p");
  naf_unsafe.body = {pos(make_atom("q")), naf(make_atom("r", {variable("Z")}))};
  CHECK(!is_safe(naf_unsafe));
}

TEST_CASE("validate_program rejects arity clashes") {
  LogicProgram p;
  p.add_fact(make_atom("edge", {constant("a"), constant("b")}));
  p.add_fact(make_atom("edge", {constant("a"), constant("next"), constant("b")}));
  CHECK_THROWS_WITH_AS(validate_program(p), doctest::Contains("arity clash"), LogicError);
}

TEST_CASE("validate_program accepts choice pairs and rejects bare abducible heads") {
  LogicProgram good;
  good.abducibles = {"act"};
  good.add_rule(make_atom("act"), {pos(make_atom("pre")), naf(make_atom("no_act"))});
  good.add_rule(make_atom("no_act"), {pos(make_atom("pre")), naf(make_atom("act"))});
  good.add_fact(make_atom("pre"));
  CHECK_NOTHROW(validate_program(good));

  LogicProgram bad;
  bad.abducibles = {"act"};
  bad.add_rule(make_atom("act"), {pos(make_atom("pre"))});
  bad.add_fact(make_atom("pre"));
  CHECK_THROWS_WITH_AS(validate_program(bad), doctest::Contains("choice pair"), LogicError);
}
