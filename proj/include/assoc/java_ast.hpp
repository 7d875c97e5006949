#ifndef ASSOC_JAVA_AST_HPP
#define ASSOC_JAVA_AST_HPP

#include <string>
#include <utility>
#include <vector>

#include "assoc/java_lex.hpp"

namespace assoc {

/// Syntactic analysis of a single Java method. Ancestor types are purely
/// positional: each token records the node it appears in directly and
/// that node's parent, both drawn from node_type_names().
struct MethodParse {
  std::vector<RawToken> tokens;
  // per token, parallel to tokens
  std::vector<std::pair<std::string, std::string>> ancestors;  // (parent, grandparent)
  std::vector<bool> in_return;        // token lies inside a return statement
  std::vector<int> return_type_positions;  // tokens of the declared return type
  std::string method_name;
  int param_count = 0;
};

/// Parses a single method declaration (signature + body). Unknown or
/// exotic constructs degrade to the enclosing node rather than failing;
/// only structurally broken input (unbalanced braces, no body) throws.
MethodParse parse_method(const std::string& source);

/// Convenience wrapper matching the per-position ancestor contract.
std::vector<std::pair<std::string, std::string>> ast_ancestors(
    const std::string& source);

}  // namespace assoc

#endif
