#ifndef ASSOC_JAVA_LEX_HPP
#define ASSOC_JAVA_LEX_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace assoc {

/// Token categories. Candidate tokens are the unit of classification:
/// identifiers, literals, and type names. Everything syntactic (reserved
/// words, operators, separators) is excluded from candidacy.
enum class TokenKind { Candidate, JavaKeyword, Operator, Symbol };

struct RawToken {
  std::string lexeme;
  TokenKind kind;
  int line_index;  // 0-based line within the method source
};

class LexError : public std::runtime_error {
 public:
  LexError(const std::string& msg, int line)
      : std::runtime_error(msg + " (line " + std::to_string(line) + ")"),
        line(line) {}
  int line;
};

/// Lexes a single Java method (signature + body). Whitespace and comments
/// are dropped. Throws LexError on malformed input.
std::vector<RawToken> lex_method(const std::string& source);

/// Camel-case / delimiter split, lowercased. Digits attach to the
/// preceding fragment; acronym runs split before the last capital when a
/// lowercase letter follows ("XMLParser" -> xml, parser). Idempotent.
std::vector<std::string> subtokenize(const std::string& lexeme);

/// Reserved words that disqualify a token from candidacy. Primitive type
/// names and void are deliberately absent: type tokens can be described
/// by comment entities, so they are kinded as candidates.
bool is_java_keyword(const std::string& lexeme);

/// Frozen common-type list used to exempt tokens from literal-string
/// label propagation: the 8 primitives, their boxed forms, String,
/// Object, void, CharSequence, Number.
bool is_common_java_type(const std::string& lexeme);
const std::vector<std::string>& common_java_types();

/// Frozen roster of java.util classes used by the API feature block.
bool is_java_util_class(const std::string& lexeme);
const std::vector<std::string>& java_util_classes();

/// Canonical AST node-type vocabulary. Fixed order, OTHER last.
const std::vector<std::string>& node_type_names();
int node_type_index(const std::string& name);  // unknown -> OTHER's index

inline const char* kNodeOther = "OTHER";
inline const char* kNodeRoot = "ROOT";

}  // namespace assoc

#endif
