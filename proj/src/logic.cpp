#include "interlock/logic.hpp"

#include <sstream>

namespace interlock {

Term constant(std::string name) { return Term{TermKind::Constant, std::move(name)}; }
Term variable(std::string name) { return Term{TermKind::Variable, std::move(name)}; }

bool Atom::ground() const {
  for (const auto& t : args)
    if (t.is_var()) return false;
  return true;
}

Atom make_atom(std::string pred, std::vector<Term> args) {
  return Atom{std::move(pred), std::move(args)};
}

Literal pos(Atom a) { return Literal{std::move(a), true}; }
Literal naf(Atom a) { return Literal{std::move(a), false}; }

std::string to_string(const Term& t) { return t.name; }

std::string to_string(const Atom& a) {
  if (a.args.empty()) return a.pred;
  std::ostringstream os;
  os << a.pred << '(';
  for (size_t i = 0; i < a.args.size(); ++i) {
    if (i) os << ',';
    os << a.args[i].name;
  }
  os << ')';
  return os.str();
}

std::string to_string(const Literal& l) {
  return l.positive ? to_string(l.atom) : "not " + to_string(l.atom);
}

std::string to_string(const Rule& r) {
  std::ostringstream os;
  if (r.head) os << to_string(*r.head);
  if (!r.body.empty()) {
    os << (r.head ? " :- " : ":- ");
    for (size_t i = 0; i < r.body.size(); ++i) {
      if (i) os << ", ";
      os << to_string(r.body[i]);
    }
  }
  os << '.';
  return os.str();
}

std::string to_string(const LogicProgram& p) {
  std::ostringstream os;
  for (const auto& r : p.rules) os << to_string(r) << '\n';
  return os.str();
}

Atom apply_substitution(const Atom& a, const Binding& b) {
  Atom out{a.pred, {}};
  out.args.reserve(a.args.size());
  for (const auto& t : a.args) {
    if (t.is_var()) {
      auto it = b.find(t.name);
      if (it == b.end())
        throw LogicError("unbound variable '" + t.name + "' in " + to_string(a));
      out.args.push_back(it->second);
    } else {
      out.args.push_back(t);
    }
  }
  return out;
}

Rule apply_substitution(const Rule& r, const Binding& b) {
  Rule out;
  if (r.head) out.head = apply_substitution(*r.head, b);
  out.body.reserve(r.body.size());
  for (const auto& l : r.body) out.body.push_back(Literal{apply_substitution(l.atom, b), l.positive});
  return out;
}

Rule rename_apart(const Rule& r, const std::string& tag) {
  auto rename = [&](const Atom& a) {
    Atom out{a.pred, {}};
    for (const auto& t : a.args)
      out.args.push_back(t.is_var() ? variable(t.name + "_" + tag) : t);
    return out;
  };
  Rule out;
  if (r.head) out.head = rename(*r.head);
  for (const auto& l : r.body) out.body.push_back(Literal{rename(l.atom), l.positive});
  return out;
}

std::set<std::string> rule_variables(const Rule& r) {
  std::set<std::string> vars;
  auto scan = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_var()) vars.insert(t.name);
  };
  if (r.head) scan(*r.head);
  for (const auto& l : r.body) scan(l.atom);
  return vars;
}

bool is_safe(const Rule& r) {
  std::set<std::string> bound;
  for (const auto& l : r.body) {
    if (!l.positive) continue;
    for (const auto& t : l.atom.args)
      if (t.is_var()) bound.insert(t.name);
  }
  auto check = [&](const Atom& a) {
    for (const auto& t : a.args)
      if (t.is_var() && !bound.count(t.name)) return false;
    return true;
  };
  if (r.head && !check(*r.head)) return false;
  for (const auto& l : r.body)
    if (!l.positive && !check(l.atom)) return false;
  return true;
}

void validate_program(const LogicProgram& p) {
  std::map<std::string, size_t> arity;
  auto check_arity = [&](const Atom& a) {
    auto [it, fresh] = arity.emplace(a.pred, a.args.size());
    if (!fresh && it->second != a.args.size())
      throw LogicError("arity clash for predicate '" + a.pred + "': " +
                       std::to_string(it->second) + " vs " + std::to_string(a.args.size()));
  };
  for (const auto& r : p.rules) {
    if (r.head) check_arity(*r.head);
    for (const auto& l : r.body) check_arity(l.atom);
    if (!is_safe(r)) throw LogicError("unsafe rule: " + to_string(r));
  }

  // Abducible heads must come in even-loop choice pairs: the rule carries a
  // naf literal on a companion predicate whose own rule naf-refers back.
  for (const auto& r : p.rules) {
    if (!r.head || !p.abducibles.count(r.head->pred)) continue;
    bool paired = false;
    for (const auto& l : r.body) {
      if (l.positive) continue;
      const std::string& twin = l.atom.pred;
      for (const auto& r2 : p.rules) {
        if (!r2.head || r2.head->pred != twin) continue;
        for (const auto& l2 : r2.body)
          if (!l2.positive && l2.atom.pred == r.head->pred) paired = true;
      }
    }
    if (!paired)
      throw LogicError("abducible '" + r.head->pred +
                       "' has a head rule outside a choice pair: " + to_string(r));
  }
}

}  // namespace interlock
