#include <doctest.h>

#include "interlock/parser.hpp"
#include "interlock/unfold.hpp"

using namespace interlock;

namespace {

std::string fixture(const std::string& name) {
  return std::string(INTERLOCK_SOURCE_DIR) + "/fixtures/" + name;
}

DataStructureSpec load(const std::string& name) { return parse_spec_file(fixture(name)); }

std::string term_of(const Witness& w, const std::string& param) {
  auto it = w.binding.find(param);
  REQUIRE(it != w.binding.end());
  return it->second.name;
}

}  // namespace

TEST_CASE("lists unfold to exactly one chain per depth") {
  DataStructureSpec spec = load("linked_list.spec");
  for (int d = 0; d <= 4; ++d) {
    auto insts = unfold(spec, d);
    REQUIRE(insts.size() == 1);
    CHECK(insts[0].depth == d);
    CHECK(insts[0].nodes.size() == size_t(d) + 2);  // h, interior chain, t
    CHECK(insts[0].edges.size() == size_t(d) + 1);
    CHECK(insts[0].order.keys.size() == size_t(d) + 2);
  }
  auto one = unfold(spec, 1);
  CHECK(one[0].dump() ==
        "nodes{h:kh, n1:k1, t:k2} edges{h.next=n1, n1.next=t} order{kh<k1<k2}");
}

TEST_CASE("tree shape counts follow the Catalan numbers") {
  DataStructureSpec internal = load("internal_bst.spec");
  DataStructureSpec external = load("external_bst.spec");
  int catalan[4] = {1, 1, 2, 5};
  for (int d = 0; d <= 3; ++d) {
    CHECK(unfold(internal, d).size() == size_t(catalan[d]));
    CHECK(unfold(external, d).size() == size_t(catalan[d]));
  }
}

TEST_CASE("empty internal tree carries only the sentinel structure") {
  DataStructureSpec spec = load("internal_bst.spec");
  auto insts = unfold(spec, 0);
  REQUIRE(insts.size() == 1);
  CHECK(insts[0].dump() == "nodes{h:kh, t} edges{h.right=t} order{kh<ktop}");
}

TEST_CASE("unfolding collects instances ascending by depth") {
  DataStructureSpec spec = load("internal_bst.spec");
  auto insts = unfold_up_to(spec, 3);
  REQUIRE(insts.size() == 9);  // 1 + 1 + 2 + 5
  for (size_t i = 1; i < insts.size(); ++i) CHECK(insts[i - 1].depth <= insts[i].depth);
}

TEST_CASE("fresh parameters are the ones bound only through keys") {
  DataStructureSpec list = load("linked_list.spec");
  const BlockSpec& ins = list.operations[0].blocks[0];
  CHECK(fresh_node_params(ins) == std::vector<std::string>{"target"});
  CHECK(fresh_key_params(ins) == std::vector<std::string>{"ktarget"});
  const BlockSpec& del = list.operations[1].blocks[0];
  CHECK(fresh_node_params(del).empty());
  CHECK(fresh_key_params(del).empty());

  DataStructureSpec external = load("external_bst.spec");
  const BlockSpec& leftlow = external.operations[0].blocks[0];
  CHECK(fresh_node_params(leftlow) == std::vector<std::string>{"target", "rt"});
  CHECK(fresh_key_params(leftlow) == std::vector<std::string>{"ktarget", "krt"});
}

TEST_CASE("list insert witnesses cover every interior gap") {
  DataStructureSpec spec = load("linked_list.spec");
  auto insts = unfold(spec, 1);
  REQUIRE(insts.size() == 1);
  const Instance& delta = insts[0];
  auto ws = block_witnesses(spec, delta, spec.operations[0], spec.operations[0].blocks[0]);
  REQUIRE(ws.size() == 2);
  CHECK(term_of(ws[0], "x") == "h");
  CHECK(term_of(ws[0], "y") == "n1");
  CHECK(term_of(ws[0], "target") == "target");
  CHECK(term_of(ws[0], "ktarget") == "ktarget");
  CHECK(ws[0].order.keys == std::vector<std::string>{"kh", "ktarget", "k1", "k2"});
  CHECK(term_of(ws[1], "x") == "n1");
  CHECK(term_of(ws[1], "y") == "t");
}

TEST_CASE("list delete has one witness on the one-node chain") {
  DataStructureSpec spec = load("linked_list.spec");
  const Instance delta = unfold(spec, 1).at(0);
  auto ws = block_witnesses(spec, delta, spec.operations[1], spec.operations[1].blocks[0]);
  REQUIRE(ws.size() == 1);
  CHECK(term_of(ws[0], "x") == "h");
  CHECK(term_of(ws[0], "target") == "n1");
  CHECK(term_of(ws[0], "y") == "t");
  CHECK(ws[0].order.keys == delta.order.keys);  // nothing fresh to place
}

TEST_CASE("the least common list instance is the one-node chain") {
  DataStructureSpec spec = load("linked_list.spec");
  auto common = find_least_common_instance(spec, 4);
  REQUIRE(common.has_value());
  CHECK(common->instance.depth == 1);
  const Witness& del = common->witnesses.at({"delete", "block1"});
  CHECK(term_of(del, "target") == "n1");
}

TEST_CASE("the least common internal bst instance is the splice shape") {
  DataStructureSpec spec = load("internal_bst.spec");
  auto common = find_least_common_instance(spec, 4);
  REQUIRE(common.has_value());
  const Instance& delta = common->instance;
  CHECK(delta.depth == 3);
  CHECK(delta.order.keys == std::vector<std::string>{"kh", "k1", "k3", "k2", "ktop"});
  auto has_edge = [&](const std::string& s, const std::string& f, const std::string& d) {
    for (const auto& [a, b, c] : delta.edges)
      if (a == s && b == f && c == d) return true;
    return false;
  };
  CHECK(has_edge("h", "right", "n1"));
  CHECK(has_edge("n1", "right", "n2"));
  CHECK(has_edge("n2", "left", "n3"));
  CHECK(has_edge("n3", "left", "t"));

  const Witness& del = common->witnesses.at({"delete", "splice"});
  CHECK(term_of(del, "g") == "h");
  CHECK(term_of(del, "target") == "n1");
  CHECK(term_of(del, "xl") == "t");
  CHECK(term_of(del, "r") == "n2");
  CHECK(term_of(del, "s") == "n3");
  CHECK(term_of(del, "sr") == "t");
}

TEST_CASE("the least common external bst instance serves all eight blocks") {
  DataStructureSpec spec = load("external_bst.spec");
  auto common = find_least_common_instance(spec, 4);
  REQUIRE(common.has_value());
  const Instance& delta = common->instance;
  CHECK(delta.depth == 3);
  CHECK(delta.order.keys == std::vector<std::string>{"kh", "k2", "k1", "k5", "k4", "k6", "k3",
                                                     "k7", "ktop"});
  CHECK(common->witnesses.size() == 8);
  const Witness& ll = common->witnesses.at({"delete", "leftleft"});
  CHECK(term_of(ll, "g") == "n3");
  CHECK(term_of(ll, "r") == "n4");
  CHECK(term_of(ll, "target") == "n5");
  CHECK(term_of(ll, "sb") == "n6");
  const Witness& ins = common->witnesses.at({"insert", "leftlow"});
  CHECK(term_of(ins, "p") == "n1");
  CHECK(term_of(ins, "x") == "n2");
  CHECK(term_of(ins, "rt") == "rt");
}

TEST_CASE("fixture block preconditions are mutually exclusive") {
  CHECK(exclusion_diagnostics(load("linked_list.spec"), 2).empty());
  CHECK(exclusion_diagnostics(load("internal_bst.spec"), 3).empty());
  CHECK(exclusion_diagnostics(load("external_bst.spec"), 3).empty());
}

TEST_CASE("overlapping blocks are reported with their instance") {
  std::string text =
      "name(twin).\n"
      "rule(list, [node(h), key(h, kh), edge(h, X), key(X, KX), lt(kh, KX), suffix(X)]).\n"
      "rule(suffix(t), []).\n"
      "rule(suffix(X), [node(X), edge(X, Y), key(X, KX), key(Y, KY), lt(KX, KY), suffix(Y)]).\n"
      "reach(h).\n"
      "reach(X) :- edge(Y, X), reach(Y).\n"
      "invariant(list).\nfluent(list).\nfluent(suffix).\nfluent(reach).\nfluent(edge).\n"
      "start_node(h).\nend_node(t).\n"
      "primitive(link(X, Y), modifies(X)).\n"
      "causes(edge(X, Y), link(X, Y)).\n"
      "code(insert, first,\n"
      "     [reach(x), edge(x, y), key(x, kx), key(y, ky), key(target, ktarget),\n"
      "      kx < ktarget, ktarget < ky, not(reach(target))],\n"
      "     [link(x, target), link(target, y)], [reach(target)]).\n"
      "code(insert, second,\n"
      "     [reach(a), edge(a, b), key(a, ka), key(b, kb), key(target, ktarget),\n"
      "      ka < ktarget, ktarget < kb, not(reach(target))],\n"
      "     [link(a, target), link(target, b)], [reach(target)]).\n";
  DataStructureSpec spec = parse_spec(text);
  auto diags = exclusion_diagnostics(spec, 1);
  REQUIRE(diags.size() == 1);
  CHECK(diags[0].find("operation insert") != std::string::npos);
  CHECK(diags[0].find("first") != std::string::npos);
  CHECK(diags[0].find("second") != std::string::npos);
  CHECK(validate_spec(spec, 1).size() == 1);
}

TEST_CASE("unfolding rejects malformed structural programs") {
  DataStructureSpec spec = load("linked_list.spec");
  spec.invariant = "nothing";
  CHECK_THROWS_WITH_AS(unfold(spec, 1), doctest::Contains("no structural rule defines"),
                       UnfoldError);

  DataStructureSpec bad = load("linked_list.spec");
  bad.structural[2].body.push_back(pos(make_atom("reach", {variable("X")})));
  CHECK_THROWS_WITH_AS(unfold(bad, 1), doctest::Contains("not allowed in structural rules"),
                       UnfoldError);
}
