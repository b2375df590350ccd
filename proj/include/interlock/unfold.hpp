#pragma once

// Bounded unfolding of the recursive structural definition into concrete
// instances, block witness search over an instance, selection of the least
// instance common to all blocks, and the block mutual-exclusion check.

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "interlock/solver.hpp"
#include "interlock/spec.hpp"

namespace interlock {

struct UnfoldError : Error {
  using Error::Error;
};

// A finite instance of the data structure: named nodes, field-labeled
// edges, per-node keys, and a total key order. depth counts applications
// of recursive structural clauses below the top-level clause.
struct Instance {
  std::vector<std::string> nodes;  // first-mention order
  std::vector<std::tuple<std::string, std::string, std::string>> edges;  // src, field, dst
  std::map<std::string, std::string> key_of;
  KeyOrder order;
  int depth = 0;

  std::vector<Atom> facts() const;  // node/1, key/2, edge/3
  std::string dump() const;         // one-line canonical description
};

// Instances of exactly the given depth, in derivation order (clauses tried
// in spec order, derivations explored depth-first).
std::vector<Instance> unfold(const DataStructureSpec& spec, int depth);

// Instances of depth 0..max_depth, ascending by depth, derivation order
// within a depth.
std::vector<Instance> unfold_up_to(const DataStructureSpec& spec, int max_depth);

// One way a block applies to an instance: a constant for every block
// parameter, plus the key order extended with the block's fresh keys.
// Fresh nodes and fresh keys are named after their parameters.
struct Witness {
  std::string op;
  std::string block;
  Binding binding;
  KeyOrder order;
};

// Node parameters that denote nodes absent from the instance: bound in the
// precondition only through key/2 atoms and naf literals.
std::vector<std::string> fresh_node_params(const BlockSpec& block);
// Key parameters bound only as keys of fresh nodes (or inside builtins).
std::vector<std::string> fresh_key_params(const BlockSpec& block);

// Every way the block applies to the instance. Key placements are tried in
// gap order, bindings within one placement in lexicographic order, and
// bindings already seen under an earlier placement are dropped.
std::vector<Witness> block_witnesses(const DataStructureSpec& spec, const Instance& inst,
                                     const OperationSpec& op, const BlockSpec& block);

struct CommonInstance {
  Instance instance;
  // (operation name, block id) -> first witness on the instance
  std::map<std::pair<std::string, std::string>, Witness> witnesses;
};

// Least-depth, first-in-derivation-order instance on which every block of
// every operation has a witness.
std::optional<CommonInstance> find_least_common_instance(const DataStructureSpec& spec,
                                                         int max_depth);

// For every operation and unordered pair of its blocks, reports instances
// (up to the given depth) on which both preconditions hold for the same
// target key. Empty result means the blocks are mutually exclusive.
std::vector<std::string> exclusion_diagnostics(const DataStructureSpec& spec, int depth);

}  // namespace interlock
