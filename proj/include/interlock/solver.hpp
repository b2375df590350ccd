#pragma once

// Bottom-up grounder and answer-set enumeration for the stratified-modulo-
// choice fragment: after fixing any truth assignment to the abducible choice
// atoms, the remaining program must be stratified. Enumeration walks the
// abducible assignments in a deterministic order and keeps exactly the
// assignments whose induced model passes the reduct stability test.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "interlock/logic.hpp"

namespace interlock {

struct SolverError : Error {
  using Error::Error;
};

// Strict total order over symbolic key constants; index order is key order.
struct KeyOrder {
  std::vector<std::string> keys;

  bool has(const std::string& k) const;
  size_t index(const std::string& k) const;
  bool lt(const std::string& a, const std::string& b) const;
  // All total orders obtained by inserting the `fresh` keys, in every
  // relative order, into one interior gap (between consecutive existing
  // keys). Sentinels anchor the ends, so exterior gaps are not generated.
  std::vector<KeyOrder> placements(const std::vector<std::string>& fresh) const;
};

struct Domain {
  std::vector<std::string> nodes;  // eq_node ranges over these
};

struct GroundRule {
  int head = -1;  // -1 encodes a constraint
  std::vector<int> pos;
  std::vector<int> neg;

  bool operator<(const GroundRule& o) const {
    if (head != o.head) return head < o.head;
    if (pos != o.pos) return pos < o.pos;
    return neg < o.neg;
  }
};

struct GroundProgram {
  std::vector<std::string> atom_names;       // id -> canonical text
  std::map<std::string, int> atom_ids;       // canonical text -> id
  std::vector<std::string> atom_pred;        // id -> predicate name
  std::vector<GroundRule> rules;
  std::set<std::string> abducibles;

  int atom_id(const std::string& name) const;  // -1 if absent
  std::string dump() const;                    // one rule per line
};

// Instantiates every rule over the derivable-atom closure, evaluating the
// builtins (lt, eq_num over key constants; eq_node over domain nodes)
// against `order` and dropping them from rule bodies.
GroundProgram ground(const LogicProgram& program, const Domain& domain, const KeyOrder& order);

struct AnswerSet {
  std::set<std::string> atoms;

  bool contains(const std::string& atom) const { return atoms.count(atom) != 0; }
};

constexpr uint64_t kDefaultEnumerationCap = uint64_t(1) << 20;

// All stable models, ordered by the abducible assignment enumeration
// (atoms in lexicographic order, false branch before true). Exceeding
// `cap` complete assignments is an error, not a truncation.
std::vector<AnswerSet> answer_sets(const GroundProgram& gp,
                                   uint64_t cap = kDefaultEnumerationCap);

bool entails_bravely(const GroundProgram& gp, const std::string& atom,
                     uint64_t cap = kDefaultEnumerationCap);
bool entails_cautiously(const GroundProgram& gp, const std::string& atom,
                        uint64_t cap = kDefaultEnumerationCap);

std::string dump_models(const std::vector<AnswerSet>& models);  // atoms per line, "---" separators

// Canonical ground-atom text helpers, matching the grounder's interning.
std::string ground_atom_name(const std::string& pred, const std::vector<std::string>& args);
std::pair<std::string, std::vector<std::string>> parse_ground_atom(const std::string& atom);

}  // namespace interlock
