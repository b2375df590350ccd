#pragma once

// Parsed form of a data structure specification: the recursive structural
// definition, derived rules, fluent declarations, traversal knowledge, the
// destructive update primitive, and per-operation code blocks.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "interlock/logic.hpp"

namespace interlock {

struct SpecError : Error {
  using Error::Error;
};

enum class Sort { Node, Key, Field, Unknown };

// One pointer write: source.field = dest.
struct LinkAction {
  Term source;
  std::string field;  // "next" for unlabeled specs
  Term dest;

  bool operator==(const LinkAction& o) const {
    return source == o.source && field == o.field && dest == o.dest;
  }
};

struct BlockSpec {
  std::string id;
  std::vector<Literal> pre;
  std::vector<LinkAction> steps;
  std::vector<Literal> post;
  // Parameters (lowercase names local to the block), in first-occurrence
  // order over pre then steps then post. The fresh node a block introduces
  // or removes is conventionally named "target".
  std::vector<std::string> node_params;
  std::vector<std::string> key_params;

  bool has_node_param(const std::string& n) const;
};

struct OperationSpec {
  std::string name;
  std::vector<BlockSpec> blocks;
};

struct PrimitiveDecl {
  std::string action = "link";
  size_t modifies = 0;  // argument position of the written node
  // caused fluent atom paired with the action shape that causes it
  std::vector<std::pair<Atom, Atom>> causes;
};

struct DataStructureSpec {
  std::string name;
  std::vector<Rule> structural;  // rule/2 clauses, unfolded by meta-interpretation
  std::vector<Rule> derived;     // plain clauses (reach, present, next_node, ...)
  std::set<std::string> fluents;
  std::string invariant;
  std::string start_node;
  std::string end_node;
  PrimitiveDecl primitive;
  std::vector<OperationSpec> operations;

  std::set<std::string> key_constants;    // key-sorted constants of structural rules
  std::set<std::string> field_constants;  // edge labels in use
  std::map<std::string, std::vector<Sort>> sorts;  // inferred argument sorts

  const OperationSpec* find_operation(const std::string& op) const;
  const Rule* next_node_rule() const;  // nullptr when the spec declares none
};

// Canonical text form; parsing the result reproduces the same spec.
std::string to_text(const DataStructureSpec& spec);

// Structural diagnostics plus, for depth > 0, a mutual-exclusion check of
// block preconditions over instances unfolded up to that depth. Empty
// result means the spec is well-formed.
std::vector<std::string> validate_spec(const DataStructureSpec& spec, int exclusion_depth = 0);

// Argument-sort inference over all rules and blocks, seeded by the core
// vocabulary (edge, key, link, node, builtins). Fills spec.sorts and the
// per-block parameter lists; throws SpecError on a sort clash.
void infer_sorts(DataStructureSpec& spec);

}  // namespace interlock
