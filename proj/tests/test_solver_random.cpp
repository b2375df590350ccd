#include <random>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "interlock/solver.hpp"

using namespace interlock;

namespace {

// Independent stable-model finder: try every subset of atoms, keep M iff
// M equals the least model of the reduct and violates no constraint.
std::set<std::set<std::string>> brute_force_stable(const GroundProgram& gp) {
  size_t n = gp.atom_names.size();
  REQUIRE(n <= 16);
  std::set<std::set<std::string>> out;
  for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
    auto in_m = [&](int a) { return (mask >> a) & 1; };
    bool violated = false;
    for (const auto& r : gp.rules) {
      if (r.head >= 0) continue;
      bool fire = true;
      for (int a : r.pos)
        if (!in_m(a)) { fire = false; break; }
      if (fire)
        for (int a : r.neg)
          if (in_m(a)) { fire = false; break; }
      if (fire) { violated = true; break; }
    }
    if (violated) continue;

    std::set<int> lm;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : gp.rules) {
        if (r.head < 0 || lm.count(r.head)) continue;
        bool blocked = false;
        for (int a : r.neg)
          if (in_m(a)) { blocked = true; break; }
        if (blocked) continue;
        bool fire = true;
        for (int a : r.pos)
          if (!lm.count(a)) { fire = false; break; }
        if (fire) {
          lm.insert(r.head);
          changed = true;
        }
      }
    }
    bool equal = true;
    for (size_t a = 0; a < n && equal; ++a)
      if (bool(in_m(int(a))) != bool(lm.count(int(a)))) equal = false;
    if (!equal) continue;

    std::set<std::string> named;
    for (int a : lm) named.insert(gp.atom_names[size_t(a)]);
    out.insert(named);
  }
  return out;
}

struct Generator {
  std::mt19937& rng;

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

  // Random propositional program that stays stratified once the choice
  // atoms are fixed. Two body disciplines for derived atoms:
  //   DAG mode    - both signs, but only strictly earlier derived atoms
  //   loop mode   - positive references to any derived atom (positive
  //                 recursion allowed), negation only on choice atoms
  GroundProgram make() {
    GroundProgram gp;
    auto intern = [&](const std::string& name) {
      int id = int(gp.atom_names.size());
      gp.atom_ids[name] = id;
      gp.atom_names.push_back(name);
      gp.atom_pred.push_back(name);
      return id;
    };

    int pairs = pick(0, 3);
    int derived = pick(1, std::min(6, 12 - 2 * pairs));
    std::vector<int> d, c, nc;
    for (int i = 0; i < derived; ++i) d.push_back(intern("d" + std::to_string(i)));
    for (int i = 0; i < pairs; ++i) {
      c.push_back(intern("c" + std::to_string(i)));
      nc.push_back(intern("nc" + std::to_string(i)));
      gp.abducibles.insert("c" + std::to_string(i));
      gp.abducibles.insert("nc" + std::to_string(i));
    }
    bool dag_mode = chance(0.5);

    auto add_rule = [&](int head, std::vector<int> p, std::vector<int> n) {
      GroundRule r;
      r.head = head;
      r.pos = std::move(p);
      r.neg = std::move(n);
      gp.rules.push_back(r);
    };

    for (int i = 0; i < derived; ++i) {
      if (chance(0.25)) add_rule(d[size_t(i)], {}, {});  // fact
      int extra = pick(0, 2);
      for (int r = 0; r < extra; ++r) {
        std::vector<int> p, n;
        int lits = pick(1, 3);
        for (int l = 0; l < lits; ++l) {
          if (!c.empty() && chance(0.4)) {
            int j = pick(0, int(c.size()) - 1);
            int atom = chance(0.5) ? c[size_t(j)] : nc[size_t(j)];
            (chance(0.7) ? p : n).push_back(atom);
          } else if (dag_mode) {
            if (i == 0) continue;
            int j = pick(0, i - 1);
            (chance(0.7) ? p : n).push_back(d[size_t(j)]);
          } else {
            int j = pick(0, derived - 1);
            if (j == i) continue;
            p.push_back(d[size_t(j)]);
          }
        }
        add_rule(d[size_t(i)], std::move(p), std::move(n));
      }
    }

    for (int i = 0; i < pairs; ++i) {
      std::vector<int> pre_p, pre_n;
      int lits = pick(0, 2);
      for (int l = 0; l < lits; ++l) {
        int j = pick(0, derived - 1);
        (chance(0.7) ? pre_p : pre_n).push_back(d[size_t(j)]);
      }
      std::vector<int> p1 = pre_p, n1 = pre_n;
      n1.push_back(nc[size_t(i)]);
      add_rule(c[size_t(i)], std::move(p1), std::move(n1));
      std::vector<int> p2 = pre_p, n2 = pre_n;
      n2.push_back(c[size_t(i)]);
      add_rule(nc[size_t(i)], std::move(p2), std::move(n2));
    }

    int constraints = pick(0, 2);
    int total = int(gp.atom_names.size());
    for (int k = 0; k < constraints; ++k) {
      std::vector<int> p, n;
      int lits = pick(1, 2);
      for (int l = 0; l < lits; ++l) {
        int a = pick(0, total - 1);
        (chance(0.6) ? p : n).push_back(a);
      }
      GroundRule r;
      r.pos = std::move(p);
      r.neg = std::move(n);
      gp.rules.push_back(r);
    }
    return gp;
  }
};

}  // namespace

TEST_CASE("enumeration matches brute force on 1000 random choice programs") {
  std::mt19937 rng(20260822);
  Generator gen{rng};
  for (int iter = 0; iter < 1000; ++iter) {
    CAPTURE(iter);
    GroundProgram gp = gen.make();
    std::vector<AnswerSet> got = answer_sets(gp, uint64_t(1) << 16);
    std::set<std::set<std::string>> got_sets;
    for (const auto& m : got) got_sets.insert(m.atoms);
    REQUIRE(got_sets.size() == got.size());  // no duplicate models
    std::set<std::set<std::string>> want = brute_force_stable(gp);
    REQUIRE(got_sets == want);
  }
}
