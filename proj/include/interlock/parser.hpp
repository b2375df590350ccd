#pragma once

// Reader for the Prolog-style specification format: facts and rules ending
// in '.', '%' line comments, uppercase variables, 'not(...)' for negation,
// infix '<' and '=' sugar for the key-order builtins, and the special
// clause shapes name/1, rule/2, fluent/1, invariant/1, start_node/1,
// end_node/1, primitive/2, causes/2, code/5.

#include <string>

#include "interlock/spec.hpp"

namespace interlock {

struct ParseError : Error {
  using Error::Error;
};

DataStructureSpec parse_spec(const std::string& text);

DataStructureSpec parse_spec_file(const std::string& path);

}  // namespace interlock
