#include "interlock/solver.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace interlock {

bool KeyOrder::has(const std::string& k) const {
  return std::find(keys.begin(), keys.end(), k) != keys.end();
}

size_t KeyOrder::index(const std::string& k) const {
  auto it = std::find(keys.begin(), keys.end(), k);
  if (it == keys.end()) throw SolverError("key '" + k + "' missing from key order");
  return size_t(it - keys.begin());
}

bool KeyOrder::lt(const std::string& a, const std::string& b) const {
  return index(a) < index(b);
}

std::vector<KeyOrder> KeyOrder::placements(const std::vector<std::string>& fresh) const {
  if (fresh.empty()) return {*this};
  std::vector<KeyOrder> out;
  std::vector<std::string> perm = fresh;
  std::sort(perm.begin(), perm.end());
  do {
    for (size_t gap = 1; gap < keys.size(); ++gap) {
      KeyOrder o = *this;
      o.keys.insert(o.keys.begin() + long(gap), perm.begin(), perm.end());
      out.push_back(std::move(o));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

int GroundProgram::atom_id(const std::string& name) const {
  auto it = atom_ids.find(name);
  return it == atom_ids.end() ? -1 : it->second;
}

std::string GroundProgram::dump() const {
  std::ostringstream os;
  for (const auto& r : rules) {
    if (r.head >= 0) os << atom_names[size_t(r.head)];
    if (!r.pos.empty() || !r.neg.empty()) {
      os << " :- ";
      bool first = true;
      for (int a : r.pos) {
        if (!first) os << ", ";
        os << atom_names[size_t(a)];
        first = false;
      }
      for (int a : r.neg) {
        if (!first) os << ", ";
        os << "not " << atom_names[size_t(a)];
        first = false;
      }
    }
    os << ".\n";
  }
  return os.str();
}

std::string ground_atom_name(const std::string& pred, const std::vector<std::string>& args) {
  if (args.empty()) return pred;
  std::string s = pred + "(";
  for (size_t i = 0; i < args.size(); ++i) {
    if (i) s += ',';
    s += args[i];
  }
  s += ')';
  return s;
}

std::pair<std::string, std::vector<std::string>> parse_ground_atom(const std::string& s) {
  auto lp = s.find('(');
  if (lp == std::string::npos) return {s, {}};
  std::string pred = s.substr(0, lp);
  std::vector<std::string> args;
  std::string cur;
  for (size_t i = lp + 1; i < s.size(); ++i) {
    char c = s[i];
    if (c == ',' || c == ')') {
      args.push_back(cur);
      cur.clear();
      if (c == ')') break;
    } else {
      cur += c;
    }
  }
  return {pred, args};
}

namespace {

class Grounder {
 public:
  Grounder(const LogicProgram& p, const Domain& d, const KeyOrder& o)
      : program_(p), domain_(d), order_(o) {
    gp_.abducibles = p.abducibles;
  }

  GroundProgram run() {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& r : program_.rules) {
        Binding b;
        if (instantiate(r, 0, std::vector<bool>(r.body.size(), false), b)) changed = true;
      }
    }
    return std::move(gp_);
  }

 private:
  const LogicProgram& program_;
  const Domain& domain_;
  const KeyOrder& order_;
  GroundProgram gp_;
  std::map<std::string, std::vector<int>> by_pred_;  // derivable atoms per predicate
  std::set<GroundRule> seen_;
  std::vector<Atom> atoms_;  // structured form, index == id

  int intern(const Atom& a) {
    std::string name = to_string(a);
    auto it = gp_.atom_ids.find(name);
    if (it != gp_.atom_ids.end()) return it->second;
    int id = int(gp_.atom_names.size());
    gp_.atom_ids.emplace(name, id);
    gp_.atom_names.push_back(name);
    gp_.atom_pred.push_back(a.pred);
    atoms_.push_back(a);
    return id;
  }

  bool derivable_mark(int id) {
    const Atom& a = atoms_[size_t(id)];
    auto& v = by_pred_[a.pred];
    if (std::find(v.begin(), v.end(), id) != v.end()) return false;
    v.push_back(id);
    return true;
  }

  bool is_builtin(const std::string& pred) const { return program_.builtins.count(pred) != 0; }

  static bool bound(const Term& t, const Binding& b) {
    return !t.is_var() || b.count(t.name);
  }
  static std::string value(const Term& t, const Binding& b) {
    return t.is_var() ? b.at(t.name).name : t.name;
  }

  void require_key(const std::string& c, const std::string& pred) const {
    if (!order_.has(c))
      throw SolverError("builtin " + pred + " applied to non-key constant '" + c + "'");
  }
  void require_node(const std::string& c) const {
    if (order_.has(c))
      throw SolverError("builtin eq_node applied to key constant '" + c + "'");
  }

  // Enumerates bindings satisfying one builtin literal, extending b.
  template <typename Fn>
  bool builtin_solutions(const Atom& a, Binding b, Fn&& k) {
    if (a.args.size() != 2) throw SolverError("builtin " + a.pred + " expects two arguments");
    const Term &ta = a.args[0], &tb = a.args[1];
    auto with = [&](const std::string& va, const std::string& vb) {
      Binding nb = b;
      if (ta.is_var()) nb[ta.name] = constant(va);
      if (tb.is_var()) nb[tb.name] = constant(vb);
      return k(nb);
    };
    if (a.pred == "eq_node") {
      if (bound(ta, b)) require_node(value(ta, b));
      if (bound(tb, b)) require_node(value(tb, b));
      if (bound(ta, b) && bound(tb, b))
        return value(ta, b) == value(tb, b) ? with(value(ta, b), value(tb, b)) : false;
      if (bound(ta, b)) return with(value(ta, b), value(ta, b));
      if (bound(tb, b)) return with(value(tb, b), value(tb, b));
      bool any = false;
      for (const auto& n : domain_.nodes) any = with(n, n) || any;
      return any;
    }
    // lt / eq_num range over the key order
    if (bound(ta, b)) require_key(value(ta, b), a.pred);
    if (bound(tb, b)) require_key(value(tb, b), a.pred);
    if (a.pred == "eq_num") {
      if (bound(ta, b) && bound(tb, b))
        return value(ta, b) == value(tb, b) ? with(value(ta, b), value(tb, b)) : false;
      if (bound(ta, b)) return with(value(ta, b), value(ta, b));
      if (bound(tb, b)) return with(value(tb, b), value(tb, b));
      bool any = false;
      for (const auto& n : order_.keys) any = with(n, n) || any;
      return any;
    }
    if (a.pred != "lt") throw SolverError("unknown builtin '" + a.pred + "'");
    if (bound(ta, b) && bound(tb, b))
      return order_.lt(value(ta, b), value(tb, b)) ? with(value(ta, b), value(tb, b)) : false;
    bool any = false;
    for (size_t i = 0; i < order_.keys.size(); ++i) {
      for (size_t j = 0; j < order_.keys.size(); ++j) {
        if (i >= j) continue;
        const std::string &ka = order_.keys[i], &kb = order_.keys[j];
        if (bound(ta, b) && value(ta, b) != ka) continue;
        if (bound(tb, b) && value(tb, b) != kb) continue;
        any = with(ka, kb) || any;
      }
    }
    return any;
  }

  // Depth-first body instantiation; returns true if anything new was produced.
  bool instantiate(const Rule& r, size_t, std::vector<bool> done, Binding b) {
    // pick next literal: fully-bound positive builtin, else first positive
    // non-builtin, else an unbound positive builtin, else finish
    int pick = -1;
    for (size_t i = 0; i < r.body.size(); ++i) {
      const Literal& l = r.body[i];
      if (done[i] || !l.positive || !is_builtin(l.atom.pred)) continue;
      bool all = true;
      for (const auto& t : l.atom.args)
        if (!bound(t, b)) all = false;
      if (all) { pick = int(i); break; }
    }
    if (pick < 0) {
      for (size_t i = 0; i < r.body.size(); ++i) {
        const Literal& l = r.body[i];
        if (!done[i] && l.positive && !is_builtin(l.atom.pred)) { pick = int(i); break; }
      }
    }
    if (pick < 0) {
      for (size_t i = 0; i < r.body.size(); ++i) {
        const Literal& l = r.body[i];
        if (!done[i] && l.positive && is_builtin(l.atom.pred)) { pick = int(i); break; }
      }
    }
    if (pick < 0) return finish(r, b);

    done[size_t(pick)] = true;
    const Literal& l = r.body[size_t(pick)];
    if (is_builtin(l.atom.pred)) {
      return builtin_solutions(l.atom, b,
                               [&](const Binding& nb) { return instantiate(r, 0, done, nb); });
    }
    bool any = false;
    auto it = by_pred_.find(l.atom.pred);
    if (it == by_pred_.end()) return false;
    // index into a copy: matching may intern new atoms and grow tables
    std::vector<int> candidates = it->second;
    for (int id : candidates) {
      const Atom cand = atoms_[size_t(id)];
      if (cand.args.size() != l.atom.args.size()) continue;
      Binding nb = b;
      bool ok = true;
      for (size_t i = 0; i < cand.args.size() && ok; ++i) {
        const Term& pat = l.atom.args[i];
        if (pat.is_var()) {
          auto f = nb.find(pat.name);
          if (f == nb.end())
            nb[pat.name] = cand.args[i];
          else if (!(f->second == cand.args[i]))
            ok = false;
        } else if (!(pat == cand.args[i])) {
          ok = false;
        }
      }
      if (ok) any = instantiate(r, 0, done, nb) || any;
    }
    return any;
  }

  bool finish(const Rule& r, const Binding& b) {
    GroundRule gr;
    for (const auto& l : r.body) {
      if (is_builtin(l.atom.pred)) {
        if (l.positive) continue;  // already satisfied during instantiation
        // naf over a builtin: evaluate now; a true builtin kills the rule
        Atom ga = apply_substitution(l.atom, b);
        bool holds = false;
        builtin_solutions(ga, {}, [&](const Binding&) {
          holds = true;
          return true;
        });
        if (holds) return false;
        continue;
      }
      Atom ga = apply_substitution(l.atom, b);
      if (!ga.ground()) throw SolverError("unsafe instantiation of " + to_string(l.atom));
      int id = intern(ga);
      (l.positive ? gr.pos : gr.neg).push_back(id);
    }
    bool changed = false;
    if (r.head) {
      Atom h = apply_substitution(*r.head, b);
      if (!h.ground()) throw SolverError("unsafe instantiation of head " + to_string(*r.head));
      gr.head = intern(h);
      changed = derivable_mark(gr.head) || changed;
    }
    if (seen_.insert(gr).second) {
      gp_.rules.push_back(gr);
      changed = true;
    }
    return changed;
  }
};

// ---- evaluation machinery ----

struct Strata {
  // SCCs of the non-abducible predicate dependency graph, topologically
  // ordered so that bodies precede heads.
  std::vector<std::vector<std::string>> sccs;
  std::map<std::string, int> scc_of;
};

Strata stratify(const GroundProgram& gp) {
  std::map<std::string, std::set<std::pair<std::string, bool>>> edges;  // head -> (bodypred, negative?)
  std::set<std::string> preds;
  for (const auto& r : gp.rules) {
    if (r.head < 0) continue;
    const std::string& hp = gp.atom_pred[size_t(r.head)];
    if (gp.abducibles.count(hp)) continue;
    preds.insert(hp);
    for (int a : r.pos) {
      const std::string& bp = gp.atom_pred[size_t(a)];
      if (!gp.abducibles.count(bp)) {
        edges[hp].insert({bp, false});
        preds.insert(bp);
      }
    }
    for (int a : r.neg) {
      const std::string& bp = gp.atom_pred[size_t(a)];
      if (!gp.abducibles.count(bp)) {
        edges[hp].insert({bp, true});
        preds.insert(bp);
      }
    }
  }

  // Tarjan over the predicate graph
  Strata out;
  std::map<std::string, int> index, low;
  std::vector<std::string> stack;
  std::set<std::string> on_stack;
  int counter = 0;
  std::function<void(const std::string&)> strongconnect = [&](const std::string& v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack.insert(v);
    for (const auto& [w, neg] : edges[v]) {
      (void)neg;
      if (!index.count(w)) {
        strongconnect(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack.count(w)) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::string> comp;
      while (true) {
        std::string w = stack.back();
        stack.pop_back();
        on_stack.erase(w);
        comp.push_back(w);
        if (w == v) break;
      }
      std::sort(comp.begin(), comp.end());
      for (const auto& p : comp) out.scc_of[p] = int(out.sccs.size());
      out.sccs.push_back(std::move(comp));
    }
  };
  for (const auto& p : preds)
    if (!index.count(p)) strongconnect(p);

  // Tarjan emits components in reverse topological order of the head->body
  // graph, which is exactly bodies-first; keep as-is. Negative edge inside
  // a component breaks stratification.
  for (const auto& [hp, es] : edges)
    for (const auto& [bp, neg] : es)
      if (neg && out.scc_of.at(hp) == out.scc_of.at(bp)) {
        std::string cycle;
        for (const auto& p : out.sccs[size_t(out.scc_of.at(hp))])
          cycle += (cycle.empty() ? "" : ", ") + p;
        throw SolverError("stratification error: negation cycle through predicates {" + cycle + "}");
      }
  return out;
}

std::set<int> stratified_model(const GroundProgram& gp, const Strata& st,
                               const std::set<int>& abducible_true) {
  std::set<int> m = abducible_true;
  std::vector<std::vector<const GroundRule*>> per_scc(st.sccs.size());
  for (const auto& r : gp.rules) {
    if (r.head < 0) continue;
    const std::string& hp = gp.atom_pred[size_t(r.head)];
    if (gp.abducibles.count(hp)) continue;
    per_scc[size_t(st.scc_of.at(hp))].push_back(&r);
  }
  for (const auto& rules : per_scc) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (const GroundRule* r : rules) {
        if (m.count(r->head)) continue;
        bool fire = true;
        for (int a : r->pos)
          if (!m.count(a)) { fire = false; break; }
        if (fire)
          for (int a : r->neg)
            if (m.count(a)) { fire = false; break; }
        if (fire) {
          m.insert(r->head);
          changed = true;
        }
      }
    }
  }
  return m;
}

bool constraints_ok(const GroundProgram& gp, const std::set<int>& m) {
  for (const auto& r : gp.rules) {
    if (r.head >= 0) continue;
    bool fire = true;
    for (int a : r.pos)
      if (!m.count(a)) { fire = false; break; }
    if (fire)
      for (int a : r.neg)
        if (m.count(a)) { fire = false; break; }
    if (fire) return false;
  }
  return true;
}

bool reduct_stable(const GroundProgram& gp, const std::set<int>& m) {
  std::set<int> lm;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& r : gp.rules) {
      if (r.head < 0 || lm.count(r.head)) continue;
      bool blocked = false;
      for (int a : r.neg)
        if (m.count(a)) { blocked = true; break; }
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
  return lm == m;
}

struct Enumerator {
  const GroundProgram& gp;
  uint64_t cap;
  Strata strata;
  std::vector<std::vector<int>> groups;            // topo order of abducible atom SCCs
  std::map<int, std::vector<const GroundRule*>> head_rules;  // abducible atom -> its rules
  uint64_t count = 0;

  explicit Enumerator(const GroundProgram& g, uint64_t c) : gp(g), cap(c), strata(stratify(g)) {
    std::vector<int> abd;
    for (const auto& r : gp.rules) {
      if (r.head < 0) continue;
      if (!gp.abducibles.count(gp.atom_pred[size_t(r.head)])) continue;
      head_rules[r.head].push_back(&r);
      if (std::find(abd.begin(), abd.end(), r.head) == abd.end()) abd.push_back(r.head);
    }
    std::sort(abd.begin(), abd.end(), [&](int a, int b) {
      return gp.atom_names[size_t(a)] < gp.atom_names[size_t(b)];
    });

    // transitive dependency cones over the ground atom graph
    std::map<int, std::vector<int>> adj;
    for (const auto& r : gp.rules) {
      if (r.head < 0) continue;
      auto& v = adj[r.head];
      v.insert(v.end(), r.pos.begin(), r.pos.end());
      v.insert(v.end(), r.neg.begin(), r.neg.end());
    }
    std::map<int, std::set<int>> reach;  // abducible -> abducibles it depends on
    for (int a : abd) {
      std::set<int> seen;
      std::vector<int> work = adj.count(a) ? adj[a] : std::vector<int>{};
      while (!work.empty()) {
        int x = work.back();
        work.pop_back();
        if (!seen.insert(x).second) continue;
        if (auto it = adj.find(x); it != adj.end())
          work.insert(work.end(), it->second.begin(), it->second.end());
      }
      for (int b : abd)
        if (seen.count(b)) reach[a].insert(b);
    }

    // group mutually dependent abducibles; topologically order the groups
    std::map<int, int> group_of;
    for (int a : abd) {
      if (group_of.count(a)) continue;
      std::vector<int> comp{a};
      for (int b : abd)
        if (b != a && !group_of.count(b) && reach[a].count(b) && reach[b].count(a)) comp.push_back(b);
      for (int x : comp) group_of[x] = int(groups.size());
      std::sort(comp.begin(), comp.end(), [&](int x, int y) {
        return gp.atom_names[size_t(x)] < gp.atom_names[size_t(y)];
      });
      groups.push_back(std::move(comp));
    }
    // Kahn's algorithm over group dependencies; ties broken by atom name
    size_t n = groups.size();
    std::vector<std::set<size_t>> needs(n);  // groups that must precede i
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        for (int a : groups[i])
          for (int b : groups[j])
            if (reach[a].count(b)) needs[i].insert(j);
      }
    std::vector<std::vector<int>> sorted;
    std::vector<bool> placed(n, false);
    while (sorted.size() < n) {
      int best = -1;
      for (size_t i = 0; i < n; ++i) {
        if (placed[i]) continue;
        bool ready = true;
        for (size_t j : needs[i])
          if (!placed[j]) { ready = false; break; }
        if (!ready) continue;
        if (best < 0 || gp.atom_names[size_t(groups[i][0])] <
                            gp.atom_names[size_t(groups[size_t(best)][0])])
          best = int(i);
      }
      if (best < 0) throw SolverError("internal error: cyclic abducible group order");
      placed[size_t(best)] = true;
      sorted.push_back(groups[size_t(best)]);
    }
    groups = std::move(sorted);
  }

  bool supported(int atom, const std::set<int>& m) const {
    auto it = head_rules.find(atom);
    if (it == head_rules.end()) return false;
    for (const GroundRule* r : it->second) {
      bool fire = true;
      for (int a : r->pos)
        if (a != atom && !m.count(a)) { fire = false; break; }
      if (fire)
        for (int a : r->neg)
          if (m.count(a)) { fire = false; break; }
      if (fire) return true;
    }
    return false;
  }

  // visit returns false to stop enumeration early
  void run(const std::function<bool(const std::set<int>&)>& visit) {
    std::set<int> assign;
    recurse(0, assign, visit);
  }

  bool recurse(size_t g, std::set<int>& assigned_true,
               const std::function<bool(const std::set<int>&)>& visit) {
    if (g == groups.size()) {
      if (++count > cap)
        throw SolverError("abducible enumeration cap exceeded (" + std::to_string(cap) + ")");
      std::set<int> m = stratified_model(gp, strata, assigned_true);
      if (constraints_ok(gp, m) && reduct_stable(gp, m)) return visit(m);
      return true;
    }
    const auto& group = groups[g];
    uint64_t combos = uint64_t(1) << group.size();
    for (uint64_t mask = 0; mask < combos; ++mask) {
      std::vector<int> added;
      for (size_t i = 0; i < group.size(); ++i) {
        if (mask & (uint64_t(1) << (group.size() - 1 - i))) added.push_back(group[i]);
      }
      if (group.size() == 1 && !added.empty()) {
        // support pruning: a lone abducible set true must have a firing rule
        std::set<int> probe = assigned_true;
        probe.insert(added[0]);
        std::set<int> m = stratified_model(gp, strata, probe);
        if (!supported(added[0], m)) continue;
      }
      for (int a : added) assigned_true.insert(a);
      bool keep = recurse(g + 1, assigned_true, visit);
      for (int a : added) assigned_true.erase(a);
      if (!keep) return false;
    }
    return true;
  }
};

}  // namespace

GroundProgram ground(const LogicProgram& program, const Domain& domain, const KeyOrder& order) {
  return Grounder(program, domain, order).run();
}

std::vector<AnswerSet> answer_sets(const GroundProgram& gp, uint64_t cap) {
  std::vector<AnswerSet> out;
  Enumerator e(gp, cap);
  e.run([&](const std::set<int>& m) {
    AnswerSet as;
    for (int a : m) as.atoms.insert(gp.atom_names[size_t(a)]);
    out.push_back(std::move(as));
    return true;
  });
  return out;
}

bool entails_bravely(const GroundProgram& gp, const std::string& atom, uint64_t cap) {
  int id = gp.atom_id(atom);
  if (id < 0) return false;
  bool found = false;
  Enumerator e(gp, cap);
  e.run([&](const std::set<int>& m) {
    if (m.count(id)) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

bool entails_cautiously(const GroundProgram& gp, const std::string& atom, uint64_t cap) {
  int id = gp.atom_id(atom);
  bool any = false, all = true;
  Enumerator e(gp, cap);
  e.run([&](const std::set<int>& m) {
    any = true;
    if (id < 0 || !m.count(id)) {
      all = false;
      return false;
    }
    return true;
  });
  return any && all;
}

std::string dump_models(const std::vector<AnswerSet>& models) {
  std::ostringstream os;
  for (size_t i = 0; i < models.size(); ++i) {
    if (i) os << "---\n";
    for (const auto& a : models[i].atoms) os << a << '\n';
  }
  return os.str();
}

}  // namespace interlock
