#pragma once

// First-order logic programs over a finite symbolic vocabulary: terms,
// atoms, naf literals, rules, and whole programs with abducible and
// builtin predicate declarations.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace interlock {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for malformed programs, rules, or substitutions.
struct LogicError : Error {
  using Error::Error;
};

enum class TermKind { Constant, Variable };

struct Term {
  TermKind kind = TermKind::Constant;
  std::string name;

  bool is_var() const { return kind == TermKind::Variable; }
  bool operator==(const Term& o) const { return kind == o.kind && name == o.name; }
  bool operator<(const Term& o) const {
    if (kind != o.kind) return kind < o.kind;
    return name < o.name;
  }
};

Term constant(std::string name);
Term variable(std::string name);

struct Atom {
  std::string pred;
  std::vector<Term> args;

  bool operator==(const Atom& o) const { return pred == o.pred && args == o.args; }
  bool operator<(const Atom& o) const {
    if (pred != o.pred) return pred < o.pred;
    return args < o.args;
  }
  bool ground() const;
};

Atom make_atom(std::string pred, std::vector<Term> args = {});

// positive=false means naf ("not p(...)"); classical negation is not modeled.
struct Literal {
  Atom atom;
  bool positive = true;

  bool operator==(const Literal& o) const { return positive == o.positive && atom == o.atom; }
  bool operator<(const Literal& o) const {
    if (positive != o.positive) return positive > o.positive;
    return atom < o.atom;
  }
};

Literal pos(Atom a);
Literal naf(Atom a);

// head==nullopt encodes a constraint (headless rule).
struct Rule {
  std::optional<Atom> head;
  std::vector<Literal> body;
};

using Binding = std::map<std::string, Term>;

struct LogicProgram {
  std::vector<Rule> rules;
  std::set<std::string> abducibles;  // predicate names guessed via choice pairs
  std::set<std::string> builtins = {"lt", "eq_node", "eq_num"};

  void add_fact(Atom a) { rules.push_back(Rule{std::move(a), {}}); }
  void add_rule(Atom head, std::vector<Literal> body) {
    rules.push_back(Rule{std::move(head), std::move(body)});
  }
  void add_constraint(std::vector<Literal> body) {
    rules.push_back(Rule{std::nullopt, std::move(body)});
  }
};

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const Rule& r);
std::string to_string(const LogicProgram& p);

// Applies a binding to every variable; throws LogicError if any variable
// of the rule is left unbound.
Rule apply_substitution(const Rule& r, const Binding& b);
Atom apply_substitution(const Atom& a, const Binding& b);

// Suffixes every variable with "_<tag>" so two rule instances cannot clash.
Rule rename_apart(const Rule& r, const std::string& tag);

std::set<std::string> rule_variables(const Rule& r);

// Safety: every variable occurring in the head or in a naf literal also
// occurs in a positive body literal (builtins bind their arguments).
bool is_safe(const Rule& r);

// Checks safety of every rule, arity consistency per predicate, and that
// abducible predicates appear in heads only within choice pairs
// (a <- B, not na / na <- B, not a). Throws LogicError on violation.
void validate_program(const LogicProgram& p);

}  // namespace interlock
