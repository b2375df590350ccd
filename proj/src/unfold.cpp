#include "interlock/unfold.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace interlock {

namespace {

// Meta-interpretation state of one derivation branch. Variables are bound
// through a substitution map; key/edge/lt atoms are queued and resolved
// once the derivation completes, because a base clause may determine a
// variable (typically to the end sentinel) after its first occurrence.
struct MetaState {
  std::map<std::string, Term> bind;
  std::vector<Atom> pending;
  std::vector<std::string> nodes;
  std::set<std::string> node_set;
  int next_node = 0;
  int next_clause = 0;
  int rec_count = 0;

  Term walk(Term t) const {
    while (t.is_var()) {
      auto it = bind.find(t.name);
      if (it == bind.end()) break;
      t = it->second;
    }
    return t;
  }

  bool unify(const Term& a, const Term& b) {
    Term x = walk(a);
    Term y = walk(b);
    if (x.is_var() && y.is_var()) {
      if (x.name != y.name) bind[x.name] = y;
      return true;
    }
    if (x.is_var()) {
      bind[x.name] = y;
      return true;
    }
    if (y.is_var()) {
      bind[y.name] = x;
      return true;
    }
    return x.name == y.name;
  }

  void register_node(const std::string& name) {
    if (node_set.insert(name).second) nodes.push_back(name);
  }
};

class Unfolder {
 public:
  Unfolder(const DataStructureSpec& spec, int max_depth) : spec_(spec), max_depth_(max_depth) {
    for (const auto& r : spec.structural) {
      if (r.head) structural_.insert(r.head->pred);
    }
  }

  std::vector<Instance> run() {
    std::vector<Instance> out;
    bool found_top = false;
    for (const auto& top : spec_.structural) {
      if (!top.head || top.head->pred != spec_.invariant) continue;
      if (!top.head->args.empty())
        throw UnfoldError("invariant clause head must take no arguments");
      found_top = true;
      MetaState st;
      Rule rn = rename_apart(top, clause_tag(st));
      std::vector<Atom> goals;
      for (const auto& lit : rn.body) goals.push_back(lit.atom);
      solve(std::move(goals), std::move(st), out);
    }
    if (!found_top)
      throw UnfoldError("no structural rule defines the invariant " + spec_.invariant);
    return out;
  }

 private:
  static std::string clause_tag(MetaState& st) { return "u" + std::to_string(st.next_clause++); }

  static bool clause_recursive(const Rule& clause, const std::set<std::string>& structural) {
    for (const auto& lit : clause.body) {
      if (structural.count(lit.atom.pred)) return true;
    }
    return false;
  }

  void solve(std::vector<Atom> goals, MetaState st, std::vector<Instance>& out) {
    size_t at = 0;
    while (at < goals.size()) {
      Atom g = goals[at];
      const std::string& p = g.pred;
      if (p == "node") {
        Term t = st.walk(g.args[0]);
        if (t.is_var()) {
          std::string name = "n" + std::to_string(++st.next_node);
          st.bind[t.name] = constant(name);
          st.register_node(name);
        } else {
          st.register_node(t.name);
        }
        ++at;
        continue;
      }
      if (p == "key" || p == "edge" || p == "lt") {
        Atom walked = g;
        for (auto& a : walked.args) a = st.walk(a);
        st.pending.push_back(std::move(walked));
        ++at;
        continue;
      }
      if (structural_.count(p)) {
        for (const auto& clause : spec_.structural) {
          if (!clause.head || clause.head->pred != p) continue;
          if (clause.head->args.size() != g.args.size())
            throw UnfoldError("structural call arity mismatch for " + p);
          MetaState st2 = st;
          if (clause_recursive(clause, structural_)) {
            if (st2.rec_count >= max_depth_) continue;
            ++st2.rec_count;
          }
          Rule rn = rename_apart(clause, clause_tag(st2));
          bool ok = true;
          for (size_t i = 0; i < g.args.size() && ok; ++i)
            ok = st2.unify(g.args[i], rn.head->args[i]);
          if (!ok) continue;
          std::vector<Atom> goals2;
          goals2.reserve(rn.body.size() + goals.size() - at - 1);
          for (const auto& lit : rn.body) goals2.push_back(lit.atom);
          goals2.insert(goals2.end(), goals.begin() + at + 1, goals.end());
          solve(std::move(goals2), std::move(st2), out);
        }
        return;
      }
      throw UnfoldError("predicate " + p + " is not allowed in structural rules");
    }
    finalize(st, out);
  }

  // Resolves the queued key/edge/lt atoms of a completed derivation and
  // builds the instance. Returns silently on a dead derivation: a key
  // conflict, a rewritten field, an unsatisfiable key order.
  void finalize(MetaState& st, std::vector<Instance>& out) {
    Instance inst;
    std::vector<std::string> key_seen;
    std::set<std::string> key_set;
    std::set<std::pair<std::string, std::string>> lt_edges;
    std::map<std::pair<std::string, std::string>, std::string> field_of;
    int next_key = 0;

    auto register_key = [&](const std::string& k) {
      if (key_set.insert(k).second) key_seen.push_back(k);
    };

    for (const auto& raw : st.pending) {
      Atom a = raw;
      for (auto& t : a.args) t = st.walk(t);
      if (a.pred == "key") {
        const Term& n = a.args[0];
        Term k = a.args[1];
        if (n.is_var())
          throw UnfoldError("unresolved node variable in structural key atom");
        st.register_node(n.name);
        auto it = inst.key_of.find(n.name);
        if (k.is_var()) {
          if (it != inst.key_of.end()) {
            st.bind[k.name] = constant(it->second);
          } else {
            std::string kn = "k" + std::to_string(++next_key);
            st.bind[k.name] = constant(kn);
            inst.key_of[n.name] = kn;
            register_key(kn);
          }
        } else {
          if (it != inst.key_of.end()) {
            if (it->second != k.name) return;
          } else {
            inst.key_of[n.name] = k.name;
          }
          register_key(k.name);
        }
      } else if (a.pred == "edge") {
        for (const auto& t : a.args) {
          if (t.is_var()) throw UnfoldError("unresolved variable in structural edge atom");
        }
        const std::string& src = a.args[0].name;
        const std::string& field = a.args[1].name;
        const std::string& dst = a.args[2].name;
        st.register_node(src);
        st.register_node(dst);
        auto slot = std::make_pair(src, field);
        auto it = field_of.find(slot);
        if (it != field_of.end()) {
          if (it->second != dst) return;
          continue;
        }
        field_of[slot] = dst;
        inst.edges.emplace_back(src, field, dst);
      } else {  // lt
        Term lo = a.args[0];
        Term hi = a.args[1];
        if (lo.is_var() || hi.is_var())
          throw UnfoldError("unresolved key variable in structural lt atom");
        if (lo.name == hi.name) return;
        register_key(lo.name);
        register_key(hi.name);
        lt_edges.insert({lo.name, hi.name});
      }
    }

    // Linear extension of the collected order constraints; ties broken by
    // first mention, so fresh keys come out in allocation order.
    std::map<std::string, size_t> seen_index;
    for (size_t i = 0; i < key_seen.size(); ++i) seen_index[key_seen[i]] = i;
    std::map<std::string, std::set<std::string>> needs;
    for (const auto& k : key_seen) needs[k];
    for (const auto& [lo, hi] : lt_edges) needs[hi].insert(lo);
    std::set<std::string> placed;
    while (placed.size() < key_seen.size()) {
      std::string pick;
      for (const auto& k : key_seen) {
        if (placed.count(k)) continue;
        bool ready = true;
        for (const auto& dep : needs[k]) {
          if (!placed.count(dep)) {
            ready = false;
            break;
          }
        }
        if (ready) {
          pick = k;
          break;
        }
      }
      if (pick.empty()) return;  // cyclic order constraints
      placed.insert(pick);
      inst.order.keys.push_back(pick);
    }

    inst.nodes = st.nodes;
    inst.depth = st.rec_count;
    std::string repr = inst.dump();
    if (seen_dumps_.insert(repr).second) out.push_back(std::move(inst));
  }

  const DataStructureSpec& spec_;
  int max_depth_;
  std::set<std::string> structural_;
  std::set<std::string> seen_dumps_;
};

}  // namespace

std::vector<Atom> Instance::facts() const {
  std::vector<Atom> out;
  for (const auto& n : nodes) out.push_back(make_atom("node", {constant(n)}));
  for (const auto& n : nodes) {
    auto it = key_of.find(n);
    if (it != key_of.end())
      out.push_back(make_atom("key", {constant(n), constant(it->second)}));
  }
  for (const auto& [src, field, dst] : edges)
    out.push_back(make_atom("edge", {constant(src), constant(field), constant(dst)}));
  return out;
}

std::string Instance::dump() const {
  std::ostringstream os;
  os << "nodes{";
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (i) os << ", ";
    os << nodes[i];
    auto it = key_of.find(nodes[i]);
    if (it != key_of.end()) os << ":" << it->second;
  }
  os << "} edges{";
  for (size_t i = 0; i < edges.size(); ++i) {
    if (i) os << ", ";
    os << std::get<0>(edges[i]) << "." << std::get<1>(edges[i]) << "=" << std::get<2>(edges[i]);
  }
  os << "} order{";
  for (size_t i = 0; i < order.keys.size(); ++i) {
    if (i) os << "<";
    os << order.keys[i];
  }
  os << "}";
  return os.str();
}

std::vector<Instance> unfold(const DataStructureSpec& spec, int depth) {
  std::vector<Instance> all = Unfolder(spec, depth).run();
  std::vector<Instance> out;
  for (auto& inst : all) {
    if (inst.depth == depth) out.push_back(std::move(inst));
  }
  return out;
}

std::vector<Instance> unfold_up_to(const DataStructureSpec& spec, int max_depth) {
  std::vector<Instance> all = Unfolder(spec, max_depth).run();
  std::stable_sort(all.begin(), all.end(),
                   [](const Instance& a, const Instance& b) { return a.depth < b.depth; });
  return all;
}

std::vector<std::string> fresh_node_params(const BlockSpec& block) {
  std::vector<std::string> out;
  for (const auto& p : block.node_params) {
    bool bound = false;
    for (const auto& lit : block.pre) {
      if (!lit.positive || lit.atom.pred == "key") continue;
      for (const auto& t : lit.atom.args) {
        if (t.is_var() && t.name == p) bound = true;
      }
    }
    if (!bound) out.push_back(p);
  }
  return out;
}

std::vector<std::string> fresh_key_params(const BlockSpec& block) {
  std::set<std::string> fresh_nodes;
  for (const auto& p : fresh_node_params(block)) fresh_nodes.insert(p);
  std::vector<std::string> out;
  for (const auto& k : block.key_params) {
    bool bound_elsewhere = false;
    for (const auto& lit : block.pre) {
      if (!lit.positive) continue;
      const Atom& a = lit.atom;
      if (a.pred == "lt" || a.pred == "eq_num" || a.pred == "eq_node") continue;
      if (a.pred == "key" && a.args.size() == 2 && a.args[0].is_var() &&
          fresh_nodes.count(a.args[0].name)) {
        continue;
      }
      for (const auto& t : a.args) {
        if (t.is_var() && t.name == k) bound_elsewhere = true;
      }
    }
    if (!bound_elsewhere) out.push_back(k);
  }
  return out;
}

namespace {

// Key constant assigned to each fresh node parameter, read off the key/2
// atoms of the precondition. Every fresh node must be keyed exactly once;
// the placement machinery has nothing to place otherwise.
std::map<std::string, std::string> fresh_key_assignment(const BlockSpec& block) {
  std::set<std::string> fresh;
  for (const auto& p : fresh_node_params(block)) fresh.insert(p);
  std::map<std::string, std::string> out;
  for (const auto& lit : block.pre) {
    if (!lit.positive || lit.atom.pred != "key" || lit.atom.args.size() != 2) continue;
    const Term& n = lit.atom.args[0];
    const Term& k = lit.atom.args[1];
    if (!n.is_var() || !fresh.count(n.name)) continue;
    if (!k.is_var())
      throw UnfoldError("fresh node " + n.name + " must be keyed by a parameter");
    auto it = out.find(n.name);
    if (it != out.end() && it->second != k.name)
      throw UnfoldError("fresh node " + n.name + " is keyed twice");
    out[n.name] = k.name;
  }
  for (const auto& p : fresh) {
    if (!out.count(p)) throw UnfoldError("fresh node " + p + " has no key atom");
  }
  return out;
}

LogicProgram base_program(const DataStructureSpec& spec, const Instance& inst,
                          const std::vector<std::pair<std::string, std::string>>& fresh) {
  LogicProgram prog;
  for (const auto& a : inst.facts()) prog.add_fact(a);
  for (const auto& [node, key] : fresh) {
    prog.add_fact(make_atom("node", {constant(node)}));
    prog.add_fact(make_atom("key", {constant(node), constant(key)}));
  }
  for (const auto& r : spec.structural) prog.rules.push_back(r);
  for (const auto& r : spec.derived) prog.rules.push_back(r);
  return prog;
}

std::string binding_repr(const Binding& b) {
  std::string out;
  for (const auto& [name, term] : b) out += name + "=" + term.name + ";";
  return out;
}

}  // namespace

std::vector<Witness> block_witnesses(const DataStructureSpec& spec, const Instance& inst,
                                     const OperationSpec& op, const BlockSpec& block) {
  auto fresh_assign = fresh_key_assignment(block);
  std::vector<std::pair<std::string, std::string>> fresh(fresh_assign.begin(),
                                                         fresh_assign.end());
  std::vector<std::string> fkeys = fresh_key_params(block);

  LogicProgram prog = base_program(spec, inst, fresh);
  std::vector<std::string> params = block.node_params;
  params.insert(params.end(), block.key_params.begin(), block.key_params.end());
  std::vector<Term> head_args;
  for (const auto& p : params) head_args.push_back(variable(p));
  prog.add_rule(make_atom("wit__", head_args), block.pre);

  Domain dom;
  dom.nodes = inst.nodes;
  for (const auto& [node, key] : fresh) dom.nodes.push_back(node);

  std::vector<KeyOrder> orders =
      fkeys.empty() ? std::vector<KeyOrder>{inst.order} : inst.order.placements(fkeys);

  std::vector<Witness> out;
  std::set<std::string> seen;
  for (const auto& order : orders) {
    GroundProgram gp = ground(prog, dom, order);
    std::vector<AnswerSet> models = answer_sets(gp);
    for (const auto& model : models) {
      for (const auto& atom : model.atoms) {
        auto [pred, args] = parse_ground_atom(atom);
        if (pred != "wit__") continue;
        Binding binding;
        for (size_t i = 0; i < params.size(); ++i) binding[params[i]] = constant(args[i]);
        if (!seen.insert(binding_repr(binding)).second) continue;
        out.push_back(Witness{op.name, block.id, std::move(binding), order});
      }
    }
  }
  return out;
}

std::optional<CommonInstance> find_least_common_instance(const DataStructureSpec& spec,
                                                         int max_depth) {
  for (int d = 0; d <= max_depth; ++d) {
    for (const auto& inst : unfold(spec, d)) {
      CommonInstance common;
      common.instance = inst;
      bool all = true;
      for (const auto& op : spec.operations) {
        for (const auto& block : op.blocks) {
          auto ws = block_witnesses(spec, inst, op, block);
          if (ws.empty()) {
            all = false;
            break;
          }
          common.witnesses[{op.name, block.id}] = ws.front();
        }
        if (!all) break;
      }
      if (all) return common;
    }
  }
  return std::nullopt;
}

namespace {

// Renames every parameter variable of a literal with the given prefix,
// except the shared ones.
Literal rename_params(const Literal& lit, const std::string& prefix,
                      const std::set<std::string>& shared) {
  Literal out = lit;
  for (auto& t : out.atom.args) {
    if (t.is_var() && !shared.count(t.name)) t.name = prefix + t.name;
  }
  return out;
}

bool blocks_overlap(const DataStructureSpec& spec, const Instance& inst, const BlockSpec& b1,
                    const BlockSpec& b2) {
  std::set<std::string> shared;
  if (b1.has_node_param("target") && b2.has_node_param("target")) {
    shared.insert("target");
    shared.insert("ktarget");
  }

  // Fresh nodes of both blocks coexist; the shared target is one node.
  std::map<std::string, std::string> fresh;
  auto add_fresh = [&](const BlockSpec& b, const std::string& prefix) {
    for (const auto& [node, key] : fresh_key_assignment(b)) {
      std::string n = shared.count(node) ? node : prefix + node;
      std::string k = shared.count(key) ? key : prefix + key;
      fresh[n] = k;
    }
  };
  add_fresh(b1, "a__");
  add_fresh(b2, "b__");
  std::vector<std::pair<std::string, std::string>> fresh_list(fresh.begin(), fresh.end());

  LogicProgram prog = base_program(spec, inst, fresh_list);
  std::vector<Literal> body;
  for (const auto& lit : b1.pre) body.push_back(rename_params(lit, "a__", shared));
  for (const auto& lit : b2.pre) body.push_back(rename_params(lit, "b__", shared));
  prog.add_rule(make_atom("overlap__"), body);

  Domain dom;
  dom.nodes = inst.nodes;
  std::vector<std::string> fkeys;
  for (const auto& [node, key] : fresh_list) {
    dom.nodes.push_back(node);
    fkeys.push_back(key);
  }

  std::vector<KeyOrder> orders =
      fkeys.empty() ? std::vector<KeyOrder>{inst.order} : inst.order.placements(fkeys);
  for (const auto& order : orders) {
    GroundProgram gp = ground(prog, dom, order);
    if (entails_bravely(gp, "overlap__")) return true;
  }
  return false;
}

}  // namespace

std::vector<std::string> exclusion_diagnostics(const DataStructureSpec& spec, int depth) {
  std::vector<std::string> out;
  std::vector<Instance> insts = unfold_up_to(spec, depth);
  for (const auto& op : spec.operations) {
    for (size_t i = 0; i < op.blocks.size(); ++i) {
      for (size_t j = i + 1; j < op.blocks.size(); ++j) {
        for (const auto& inst : insts) {
          if (blocks_overlap(spec, inst, op.blocks[i], op.blocks[j])) {
            out.push_back("operation " + op.name + ": blocks " + op.blocks[i].id + " and " +
                          op.blocks[j].id + " are jointly satisfiable on instance " +
                          inst.dump());
            break;
          }
        }
      }
    }
  }
  return out;
}

}  // namespace interlock
