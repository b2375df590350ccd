#include "interlock/spec.hpp"

#include <algorithm>
#include <sstream>

#include "interlock/unfold.hpp"

namespace interlock {

bool BlockSpec::has_node_param(const std::string& n) const {
  return std::find(node_params.begin(), node_params.end(), n) != node_params.end();
}

const OperationSpec* DataStructureSpec::find_operation(const std::string& op) const {
  for (const auto& o : operations)
    if (o.name == op) return &o;
  return nullptr;
}

const Rule* DataStructureSpec::next_node_rule() const {
  for (const auto& r : derived)
    if (r.head && r.head->pred == "next_node") return &r;
  return nullptr;
}

namespace {

const char* sort_name(Sort s) {
  switch (s) {
    case Sort::Node: return "node";
    case Sort::Key: return "key";
    case Sort::Field: return "field";
    default: return "unknown";
  }
}

struct SortTable {
  const DataStructureSpec& spec;
  std::map<std::string, std::vector<Sort>>& table;
  bool changed = false;

  Sort constant_sort(const std::string& name) const {
    if (spec.key_constants.count(name)) return Sort::Key;
    if (spec.field_constants.count(name)) return Sort::Field;
    if (name == spec.start_node || name == spec.end_node) return Sort::Node;
    return Sort::Unknown;
  }

  Sort& slot(const std::string& pred, size_t pos, size_t arity) {
    auto& v = table[pred];
    if (v.size() < arity) v.resize(arity, Sort::Unknown);
    return v[pos];
  }

  void meet(Sort& a, Sort b, const std::string& where) {
    if (b == Sort::Unknown) return;
    if (a == Sort::Unknown) {
      a = b;
      changed = true;
      return;
    }
    if (a != b)
      throw SpecError("sort clash at " + where + ": " + sort_name(a) + " vs " + sort_name(b));
  }

  // One pass over a variable scope (a rule or a block): exchange sort
  // information between the predicate table and the scope's variables.
  void scope_pass(const std::vector<Atom>& atoms) {
    std::map<std::string, Sort> vars;
    bool local = true;
    while (local) {
      local = false;
      for (const auto& a : atoms) {
        for (size_t i = 0; i < a.args.size(); ++i) {
          Sort& s = slot(a.pred, i, a.args.size());
          const Term& t = a.args[i];
          std::string where = a.pred + "/" + std::to_string(a.args.size()) + " argument " +
                              std::to_string(i + 1);
          if (t.is_var()) {
            Sort& v = vars[t.name];
            Sort before_s = s, before_v = v;
            meet(s, v, where);
            meet(v, s, "variable " + t.name + " in " + where);
            if (s != before_s || v != before_v) local = true;
          } else {
            meet(s, constant_sort(t.name), where);
          }
        }
      }
    }
  }
};

std::vector<Atom> scope_atoms(const Rule& r) {
  std::vector<Atom> atoms;
  if (r.head) atoms.push_back(*r.head);
  for (const auto& l : r.body) atoms.push_back(l.atom);
  return atoms;
}

std::vector<Atom> scope_atoms(const DataStructureSpec& spec, const BlockSpec& b) {
  std::vector<Atom> atoms;
  for (const auto& l : b.pre) atoms.push_back(l.atom);
  for (const auto& s : b.steps)
    atoms.push_back(make_atom(spec.primitive.action, {s.source, constant(s.field), s.dest}));
  for (const auto& l : b.post) atoms.push_back(l.atom);
  return atoms;
}

}  // namespace

void infer_sorts(DataStructureSpec& spec) {
  spec.sorts.clear();
  spec.sorts["edge"] = {Sort::Node, Sort::Field, Sort::Node};
  spec.sorts["key"] = {Sort::Node, Sort::Key};
  spec.sorts["node"] = {Sort::Node};
  spec.sorts["lt"] = {Sort::Key, Sort::Key};
  spec.sorts["eq_num"] = {Sort::Key, Sort::Key};
  spec.sorts["eq_node"] = {Sort::Node, Sort::Node};
  spec.sorts[spec.primitive.action] = {Sort::Node, Sort::Field, Sort::Node};

  SortTable st{spec, spec.sorts};
  st.changed = true;
  while (st.changed) {
    st.changed = false;
    for (const auto& r : spec.structural) st.scope_pass(scope_atoms(r));
    for (const auto& r : spec.derived) st.scope_pass(scope_atoms(r));
    for (const auto& [effect, action] : spec.primitive.causes)
      st.scope_pass({effect, action});
    for (const auto& o : spec.operations)
      for (const auto& b : o.blocks) st.scope_pass(scope_atoms(spec, b));
  }

  for (auto& o : spec.operations) {
    for (auto& b : o.blocks) {
      b.node_params.clear();
      b.key_params.clear();
      std::map<std::string, Sort> vars;
      std::vector<std::string> order;
      for (const auto& a : scope_atoms(spec, b)) {
        const auto& sorts = spec.sorts.at(a.pred);
        for (size_t i = 0; i < a.args.size(); ++i) {
          if (!a.args[i].is_var()) continue;
          const std::string& v = a.args[i].name;
          if (!vars.count(v)) order.push_back(v);
          Sort& s = vars[v];
          if (s == Sort::Unknown) s = sorts[i];
        }
      }
      for (const auto& v : order) {
        if (vars[v] == Sort::Node) b.node_params.push_back(v);
        if (vars[v] == Sort::Key) b.key_params.push_back(v);
      }
    }
  }
}

namespace {

bool single_default_field(const DataStructureSpec& spec) {
  return spec.field_constants == std::set<std::string>{"next"};
}

std::string render_term(const Term& t) { return t.name; }

std::string render_atom(const DataStructureSpec& spec, const Atom& a, bool infix_keys) {
  bool sugar = single_default_field(spec) &&
               (a.pred == "edge" || a.pred == spec.primitive.action) && a.args.size() == 3;
  if (infix_keys && (a.pred == "lt" || a.pred == "eq_num") && a.args.size() == 2)
    return render_term(a.args[0]) + (a.pred == "lt" ? " < " : " = ") + render_term(a.args[1]);
  std::string s = a.pred + "(";
  bool first = true;
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (sugar && i == 1) continue;
    if (!first) s += ", ";
    s += render_term(a.args[i]);
    first = false;
  }
  return s + ")";
}

std::string render_literal(const DataStructureSpec& spec, const Literal& l, bool infix_keys) {
  std::string a = render_atom(spec, l.atom, l.positive && infix_keys);
  return l.positive ? a : "not(" + a + ")";
}

std::string render_list(const DataStructureSpec& spec, const std::vector<Literal>& ls,
                        bool infix_keys) {
  std::string s = "[";
  for (size_t i = 0; i < ls.size(); ++i) {
    if (i) s += ", ";
    s += render_literal(spec, ls[i], infix_keys);
  }
  return s + "]";
}

}  // namespace

std::string to_text(const DataStructureSpec& spec) {
  std::ostringstream os;
  os << "name(" << spec.name << ").\n\n";
  for (const auto& r : spec.structural)
    os << "rule(" << render_atom(spec, *r.head, false) << ", " << render_list(spec, r.body, false)
       << ").\n";
  os << "\n";
  for (const auto& r : spec.derived) {
    os << render_atom(spec, *r.head, false);
    if (!r.body.empty()) {
      os << " :- ";
      for (size_t i = 0; i < r.body.size(); ++i) {
        if (i) os << ", ";
        os << render_literal(spec, r.body[i], false);
      }
    }
    os << ".\n";
  }
  os << "\ninvariant(" << spec.invariant << ").\n";
  for (const auto& f : spec.fluents) os << "fluent(" << f << ").\n";
  os << "start_node(" << spec.start_node << ").\n";
  os << "end_node(" << spec.end_node << ").\n\n";

  bool sugar = single_default_field(spec);
  os << "primitive(" << spec.primitive.action << "(X, "
     << (sugar ? "" : "F, ") << "Y), modifies("
     << (spec.primitive.modifies == 0 ? "X" : "Y") << ")).\n";
  for (const auto& [effect, action] : spec.primitive.causes)
    os << "causes(" << render_atom(spec, effect, false) << ", " << render_atom(spec, action, false)
       << ").\n";

  for (const auto& o : spec.operations) {
    for (const auto& b : o.blocks) {
      os << "\ncode(" << o.name << ", " << b.id << ",\n";
      os << "  " << render_list(spec, b.pre, true) << ",\n  [";
      for (size_t i = 0; i < b.steps.size(); ++i) {
        if (i) os << ", ";
        os << render_atom(spec,
                          make_atom(spec.primitive.action,
                                    {b.steps[i].source, constant(b.steps[i].field), b.steps[i].dest}),
                          false);
      }
      os << "],\n  " << render_list(spec, b.post, true) << ").\n";
    }
  }
  return os.str();
}

std::vector<std::string> validate_spec(const DataStructureSpec& spec, int exclusion_depth) {
  std::vector<std::string> out;
  if (spec.invariant.empty())
    out.push_back("spec declares no invariant");
  else if (!spec.fluents.count(spec.invariant))
    out.push_back("invariant predicate '" + spec.invariant + "' is not declared a fluent");

  auto occurs_in_structural = [&](const std::string& c) {
    for (const auto& r : spec.structural)
      for (const auto& a : scope_atoms(r))
        for (const auto& t : a.args)
          if (!t.is_var() && t.name == c) return true;
    return false;
  };
  if (spec.start_node.empty())
    out.push_back("spec declares no start_node");
  else if (!occurs_in_structural(spec.start_node))
    out.push_back("start_node '" + spec.start_node + "' does not occur in the structural rules");
  if (spec.end_node.empty())
    out.push_back("spec declares no end_node");
  else if (!occurs_in_structural(spec.end_node))
    out.push_back("end_node '" + spec.end_node + "' does not occur in the structural rules");

  std::set<std::string> known = {"edge", "key", "node", "lt", "eq_num", "eq_node"};
  for (const auto& r : spec.structural)
    for (const auto& a : scope_atoms(r)) known.insert(a.pred);
  for (const auto& r : spec.derived)
    if (r.head) known.insert(r.head->pred);
  for (const auto& o : spec.operations)
    for (const auto& b : o.blocks)
      for (const auto* side : {&b.pre, &b.post})
        for (const auto& l : *side)
          if (!known.count(l.atom.pred))
            out.push_back("block '" + b.id + "' of " + o.name + " uses unknown predicate '" +
                          l.atom.pred + "'");

  for (const auto& [effect, action] : spec.primitive.causes) {
    (void)action;
    if (!spec.fluents.count(effect.pred))
      out.push_back("caused predicate '" + effect.pred + "' is not declared a fluent");
  }

  for (const auto& o : spec.operations) {
    for (const auto& b : o.blocks) {
      std::set<std::string> pre_params;
      for (const auto& l : b.pre)
        for (const auto& t : l.atom.args)
          if (t.is_var()) pre_params.insert(t.name);
      for (const auto& s : b.steps)
        for (const Term* t : {&s.source, &s.dest})
          if (t->is_var() && t->name != "target" && !pre_params.count(t->name))
            out.push_back("step parameter '" + t->name + "' of block '" + b.id + "' in " + o.name +
                          " is bound by neither the precondition nor the target convention");
    }
  }

  if (exclusion_depth > 0) {
    for (const auto& d : exclusion_diagnostics(spec, exclusion_depth)) out.push_back(d);
  }
  return out;
}

}  // namespace interlock
