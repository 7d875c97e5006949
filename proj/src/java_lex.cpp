#include "assoc/java_lex.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace assoc {

namespace {

// Java SE 8 reserved words minus primitive type names and void, which are
// kinded as candidates (a return type can be associated with a comment
// entity). true/false/null are literals, not keywords.
const std::unordered_set<std::string>& keyword_set() {
  static const std::unordered_set<std::string> kw = {
      "abstract", "assert",     "break",    "case",       "catch",
      "class",    "const",      "continue", "default",    "do",
      "else",     "enum",       "extends",  "final",      "finally",
      "for",      "goto",       "if",       "implements", "import",
      "instanceof", "interface", "native",  "new",        "package",
      "private",  "protected",  "public",   "return",     "static",
      "strictfp", "super",      "switch",   "synchronized", "this",
      "throw",    "throws",     "transient", "try",       "volatile",
      "while"};
  return kw;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_ident_part(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// Multi-character operators, longest first so greedy matching works.
const std::vector<std::string>& multi_ops() {
  static const std::vector<std::string> ops = {
      ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "==", ">=", "<=",
      "!=",   "&&",  "||",  "++",  "--",  "+=", "-=", "*=", "/=", "&=",
      "|=",   "^=",  "%=",  "<<",  ">>"};
  return ops;
}

bool is_symbol_char(char c) {
  switch (c) {
    case '(': case ')': case '{': case '}': case '[': case ']':
    case ';': case ',': case '.': case '@':
      return true;
    default:
      return false;
  }
}

bool is_op_char(char c) {
  switch (c) {
    case '=': case '>': case '<': case '!': case '~': case '?': case ':':
    case '+': case '-': case '*': case '/': case '&': case '|': case '^':
    case '%':
      return true;
    default:
      return false;
  }
}

}  // namespace

bool is_java_keyword(const std::string& lexeme) {
  return keyword_set().count(lexeme) > 0;
}

std::vector<RawToken> lex_method(const std::string& source) {
  std::vector<RawToken> out;
  const size_t n = source.size();
  size_t i = 0;
  int line = 0;
  while (i < n) {
    char c = source[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    // comments
    if (c == '/' && i + 1 < n && source[i + 1] == '/') {
      while (i < n && source[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && source[i + 1] == '*') {
      int start_line = line;
      i += 2;
      bool closed = false;
      while (i + 1 < n) {
        if (source[i] == '\n') ++line;
        if (source[i] == '*' && source[i + 1] == '/') {
          i += 2;
          closed = true;
          break;
        }
        ++i;
      }
      if (!closed) throw LexError("unterminated block comment", start_line);
      continue;
    }
    // string literal
    if (c == '"') {
      size_t j = i + 1;
      while (j < n && source[j] != '"') {
        if (source[j] == '\\' && j + 1 < n) ++j;
        if (source[j] == '\n') throw LexError("unterminated string literal", line);
        ++j;
      }
      if (j >= n) throw LexError("unterminated string literal", line);
      out.push_back({source.substr(i, j - i + 1), TokenKind::Candidate, line});
      i = j + 1;
      continue;
    }
    // char literal
    if (c == '\'') {
      size_t j = i + 1;
      while (j < n && source[j] != '\'') {
        if (source[j] == '\\' && j + 1 < n) ++j;
        if (source[j] == '\n') throw LexError("unterminated char literal", line);
        ++j;
      }
      if (j >= n) throw LexError("unterminated char literal", line);
      out.push_back({source.substr(i, j - i + 1), TokenKind::Candidate, line});
      i = j + 1;
      continue;
    }
    // number literal (also handles .5 style and hex/binary)
    if (is_digit(c) || (c == '.' && i + 1 < n && is_digit(source[i + 1]))) {
      size_t j = i;
      if (source[j] == '0' && j + 1 < n &&
          (source[j + 1] == 'x' || source[j + 1] == 'X' ||
           source[j + 1] == 'b' || source[j + 1] == 'B')) {
        j += 2;
        while (j < n && (std::isxdigit(static_cast<unsigned char>(source[j])) ||
                         source[j] == '_'))
          ++j;
      } else {
        bool seen_dot = false, seen_exp = false;
        while (j < n) {
          char d = source[j];
          if (is_digit(d) || d == '_') {
            ++j;
          } else if (d == '.' && !seen_dot && !seen_exp && j + 1 < n &&
                     is_digit(source[j + 1])) {
            seen_dot = true;
            ++j;
          } else if ((d == 'e' || d == 'E') && !seen_exp && j + 1 < n &&
                     (is_digit(source[j + 1]) || source[j + 1] == '+' ||
                      source[j + 1] == '-')) {
            seen_exp = true;
            j += 2;
          } else {
            break;
          }
        }
      }
      if (j < n && (source[j] == 'l' || source[j] == 'L' || source[j] == 'f' ||
                    source[j] == 'F' || source[j] == 'd' || source[j] == 'D'))
        ++j;
      out.push_back({source.substr(i, j - i), TokenKind::Candidate, line});
      i = j;
      continue;
    }
    // identifier or keyword
    if (is_ident_start(c)) {
      size_t j = i + 1;
      while (j < n && is_ident_part(source[j])) ++j;
      std::string lex = source.substr(i, j - i);
      TokenKind kind =
          is_java_keyword(lex) ? TokenKind::JavaKeyword : TokenKind::Candidate;
      out.push_back({std::move(lex), kind, line});
      i = j;
      continue;
    }
    if (is_symbol_char(c)) {
      out.push_back({std::string(1, c), TokenKind::Symbol, line});
      ++i;
      continue;
    }
    if (is_op_char(c)) {
      std::string matched(1, c);
      for (const auto& op : multi_ops()) {
        if (source.compare(i, op.size(), op) == 0) {
          matched = op;
          break;
        }
      }
      out.push_back({matched, TokenKind::Operator, line});
      i += matched.size();
      continue;
    }
    throw LexError(std::string("unexpected character '") + c + "'", line);
  }
  return out;
}

std::vector<std::string> subtokenize(const std::string& lexeme) {
  std::vector<std::string> parts;
  std::string cur;
  auto flush = [&]() {
    if (!cur.empty()) {
      parts.push_back(cur);
      cur.clear();
    }
  };
  const size_t n = lexeme.size();
  for (size_t i = 0; i < n; ++i) {
    char c = lexeme[i];
    if (!std::isalnum(static_cast<unsigned char>(c))) {
      flush();
      continue;
    }
    bool boundary = false;
    if (!cur.empty()) {
      char prev = lexeme[i - 1];
      bool prev_lower = std::islower(static_cast<unsigned char>(prev));
      bool prev_upper = std::isupper(static_cast<unsigned char>(prev));
      bool prev_digit = is_digit(prev);
      if (std::isupper(static_cast<unsigned char>(c))) {
        if (prev_lower || prev_digit) {
          boundary = true;  // camelCase or sha256Sum
        } else if (prev_upper && i + 1 < n &&
                   std::islower(static_cast<unsigned char>(lexeme[i + 1]))) {
          boundary = true;  // XMLParser -> XML | Parser
        }
      } else if (std::isalpha(static_cast<unsigned char>(c)) && prev_digit) {
        boundary = true;  // digit-to-letter
      }
    }
    if (boundary) flush();
    cur.push_back(
        static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  flush();
  return parts;
}

const std::vector<std::string>& common_java_types() {
  static const std::vector<std::string> types = {
      "boolean", "byte",    "char",   "short",     "int",       "long",
      "float",   "double",  "Boolean", "Byte",     "Character", "Short",
      "Integer", "Long",    "Float",  "Double",    "String",    "Object",
      "void",    "CharSequence", "Number"};
  return types;
}

bool is_common_java_type(const std::string& lexeme) {
  const auto& t = common_java_types();
  return std::find(t.begin(), t.end(), lexeme) != t.end();
}

const std::vector<std::string>& java_util_classes() {
  static const std::vector<std::string> classes = {
      "ArrayDeque",   "ArrayList",   "Arrays",       "BitSet",
      "Calendar",     "Collection",  "Collections",  "Comparator",
      "Currency",     "Date",        "Deque",        "Dictionary",
      "EnumMap",      "EnumSet",     "Enumeration",  "Formatter",
      "HashMap",      "HashSet",     "Hashtable",    "IdentityHashMap",
      "Iterator",     "LinkedHashMap", "LinkedHashSet", "LinkedList",
      "List",         "ListIterator", "Locale",      "Map",
      "NavigableMap", "NavigableSet", "Objects",     "Optional",
      "OptionalDouble", "OptionalInt", "OptionalLong", "PriorityQueue",
      "Properties",   "Queue",       "Random",       "Scanner",
      "Set",          "SortedMap",   "SortedSet",    "Spliterator",
      "Stack",        "StringJoiner", "StringTokenizer", "Timer",
      "TimerTask",    "TreeMap",     "TreeSet",      "UUID",
      "Vector"};
  return classes;
}

bool is_java_util_class(const std::string& lexeme) {
  const auto& c = java_util_classes();
  return std::find(c.begin(), c.end(), lexeme) != c.end();
}

const std::vector<std::string>& node_type_names() {
  // Frozen per release; OTHER is always last. The one-hot feature layout
  // depends on this order.
  static const std::vector<std::string> names = {
      "MethodDeclaration",
      "TypeName",
      "TypeParameter",
      "FormalParameter",
      "MethodBody",
      "Block",
      "LocalVariableDeclaration",
      "VariableDeclarator",
      "ExpressionStatement",
      "Assignment",
      "ReturnStatement",
      "IfStatement",
      "WhileStatement",
      "DoStatement",
      "ForStatement",
      "ForControl",
      "EnhancedForControl",
      "TryStatement",
      "TryResource",
      "CatchClause",
      "FinallyClause",
      "ThrowStatement",
      "SwitchStatement",
      "SwitchCase",
      "BreakStatement",
      "ContinueStatement",
      "SynchronizedStatement",
      "AssertStatement",
      "LabeledStatement",
      "MethodInvocation",
      "Argument",
      "ClassInstanceCreation",
      "ArrayCreation",
      "ArrayInitializer",
      "ArrayAccess",
      "MemberReference",
      "BinaryOperation",
      "UnaryOperation",
      "TernaryExpression",
      "Cast",
      "ParenthesizedExpression",
      "Lambda",
      "MethodReference",
      "Annotation",
      "ClassBody",
      "ROOT",
      "OTHER"};
  return names;
}

int node_type_index(const std::string& name) {
  static const std::unordered_map<std::string, int> index = [] {
    std::unordered_map<std::string, int> m;
    const auto& names = node_type_names();
    for (size_t i = 0; i < names.size(); ++i) m[names[i]] = static_cast<int>(i);
    return m;
  }();
  auto it = index.find(name);
  if (it == index.end()) return static_cast<int>(node_type_names().size()) - 1;
  return it->second;
}

}  // namespace assoc
