#include "assoc/java_ast.hpp"

#include <cctype>
#include <unordered_set>

namespace assoc {

namespace {

bool is_modifier(const std::string& lex) {
  static const std::unordered_set<std::string> mods = {
      "public", "private",      "protected", "static", "final",
      "abstract", "synchronized", "native",  "strictfp", "default",
      "transient", "volatile"};
  return mods.count(lex) > 0;
}

bool is_identifier(const RawToken& t) {
  if (t.kind != TokenKind::Candidate || t.lexeme.empty()) return false;
  char c = t.lexeme[0];
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_assignment_op(const std::string& lex) {
  static const std::unordered_set<std::string> ops = {
      "=",  "+=", "-=",  "*=",  "/=",  "&=",
      "|=", "^=", "%=", "<<=", ">>=", ">>>="};
  return ops.count(lex) > 0;
}

int binary_prec(const std::string& lex) {
  if (lex == "||") return 1;
  if (lex == "&&") return 2;
  if (lex == "|") return 3;
  if (lex == "^") return 4;
  if (lex == "&") return 5;
  if (lex == "==" || lex == "!=") return 6;
  if (lex == "<" || lex == ">" || lex == "<=" || lex == ">=" ||
      lex == "instanceof")
    return 7;
  if (lex == "<<" || lex == ">>" || lex == ">>>") return 8;
  if (lex == "+" || lex == "-") return 9;
  if (lex == "*" || lex == "/" || lex == "%") return 10;
  return -1;
}

// Recursive-descent parser over the lexed token stream. Node identity is
// kept as a stack of node-type names; each consumed token records the top
// two entries as its (parent, grandparent).
class Parser {
 public:
  explicit Parser(std::vector<RawToken> tokens) { out_.tokens = std::move(tokens); }

  MethodParse run() {
    const size_t n = out_.tokens.size();
    out_.ancestors.assign(n, {kNodeOther, kNodeOther});
    out_.in_return.assign(n, false);
    if (n == 0) throw LexError("empty method source", 0);
    {
      Scope method(this, "MethodDeclaration");
      parse_signature();
      parse_body();
      while (pos_ < n) consume();  // tolerate trailing tokens
    }
    return std::move(out_);
  }

 private:
  MethodParse out_;
  size_t pos_ = 0;
  std::vector<std::string> stack_;
  int return_depth_ = 0;
  int depth_ = 0;

  struct Scope {
    Parser* p;
    Scope(Parser* p, const char* name) : p(p) { p->stack_.push_back(name); }
    ~Scope() { p->stack_.pop_back(); }
  };

  size_t n() const { return out_.tokens.size(); }
  bool done() const { return pos_ >= n(); }
  const std::string& lex(size_t k = 0) const {
    static const std::string empty;
    return pos_ + k < n() ? out_.tokens[pos_ + k].lexeme : empty;
  }
  const RawToken* tok(size_t k = 0) const {
    return pos_ + k < n() ? &out_.tokens[pos_ + k] : nullptr;
  }
  bool is(const char* s, size_t k = 0) const { return lex(k) == s; }

  void consume() {
    if (done()) return;
    auto& anc = out_.ancestors[pos_];
    anc.first = stack_.empty() ? kNodeRoot : stack_.back();
    anc.second = stack_.size() >= 2 ? stack_[stack_.size() - 2] : kNodeRoot;
    out_.in_return[pos_] = return_depth_ > 0;
    ++pos_;
  }

  void expect(const char* s) {
    if (is(s)) consume();
  }

  int cur_line() const {
    if (done()) return n() ? out_.tokens.back().line_index : 0;
    return out_.tokens[pos_].line_index;
  }

  // ---- type scanning (no consumption) ----

  // Returns the exclusive end of a type starting at i, or i if none.
  size_t scan_type_span(size_t i) const {
    if (i >= n() || !is_identifier(out_.tokens[i])) return i;
    ++i;
    while (i < n()) {
      const std::string& l = out_.tokens[i].lexeme;
      if (l == "." && i + 1 < n() && is_identifier(out_.tokens[i + 1])) {
        i += 2;
        continue;
      }
      if (l == "<") {
        size_t save = i;
        int depth = 0;
        size_t j = i;
        bool ok = false;
        while (j < n()) {
          const std::string& g = out_.tokens[j].lexeme;
          if (g == "<") depth += 1;
          else if (g == ">") depth -= 1;
          else if (g == ">>") depth -= 2;
          else if (g == ">>>") depth -= 3;
          else if (g == ";" || g == "{" || g == "}" || g == "(") break;
          ++j;
          if (depth <= 0) { ok = true; break; }
        }
        if (!ok) return save;
        i = j;
        continue;
      }
      if (l == "[" && i + 1 < n() && out_.tokens[i + 1].lexeme == "]") {
        i += 2;
        continue;
      }
      break;
    }
    return i;
  }

  // ---- signature ----

  void parse_signature() {
    while (!done()) {
      if (is("@") && !is("interface", 1)) {
        parse_annotation();
      } else if (tok() && tok()->kind == TokenKind::JavaKeyword &&
                 is_modifier(lex())) {
        consume();
      } else {
        break;
      }
    }
    if (is("<")) {
      Scope s(this, "TypeParameter");
      int depth = 0;
      while (!done()) {
        const std::string& l = lex();
        if (l == "<") depth += 1;
        else if (l == ">") depth -= 1;
        else if (l == ">>") depth -= 2;
        consume();
        if (depth <= 0) break;
      }
    }
    // the method name is the identifier directly before the parameter list
    size_t name_idx = pos_;
    {
      size_t i = pos_;
      int angle = 0;
      bool found = false;
      while (i < n()) {
        const std::string& l = out_.tokens[i].lexeme;
        if (l == "<") angle += 1;
        else if (l == ">") angle -= 1;
        else if (l == ">>") angle -= 2;
        else if (l == "(" && angle <= 0) {
          found = true;
          break;
        } else if (l == "{" || l == ";") {
          break;
        }
        ++i;
      }
      if (!found || i == pos_)
        throw LexError("not a method declaration", cur_line());
      name_idx = i - 1;
    }
    if (name_idx > pos_) {
      Scope t(this, "TypeName");
      while (pos_ < name_idx) {
        out_.return_type_positions.push_back(static_cast<int>(pos_));
        consume();
      }
    }
    out_.method_name = lex();
    consume();  // name, direct child of MethodDeclaration
    expect("(");
    while (!done() && !is(")")) {
      size_t before = pos_;
      parse_formal_parameter();
      if (is(",")) consume();
      if (pos_ == before) consume();
    }
    expect(")");
    // throws clause and array returns like `int foo()[]`
    while (!done() && !is("{") && !is(";")) consume();
  }

  void parse_annotation() {
    Scope s(this, "Annotation");
    consume();  // @
    size_t end = scan_type_span(pos_);
    while (pos_ < end) consume();
    if (is("(")) consume_balanced("(", ")");
  }

  void consume_balanced(const char* open, const char* close) {
    int depth = 0;
    while (!done()) {
      if (is(open)) ++depth;
      else if (is(close)) --depth;
      consume();
      if (depth <= 0) break;
    }
  }

  void parse_formal_parameter() {
    Scope s(this, "FormalParameter");
    ++out_.param_count;
    while (is("@")) parse_annotation();
    while (is("final")) consume();
    // name = last identifier before the , or ) that ends this parameter
    size_t end = pos_;
    int depth = 0;
    size_t name_idx = pos_;
    for (size_t i = pos_; i < n(); ++i) {
      const std::string& l = out_.tokens[i].lexeme;
      if (l == "(" || l == "[" || l == "<") ++depth;
      else if (l == ">" || l == "]") --depth;
      else if (l == ">>") depth -= 2;
      else if ((l == "," || l == ")") && depth <= 0) {
        end = i;
        break;
      }
      if (is_identifier(out_.tokens[i])) name_idx = i;
      end = i + 1;
    }
    if (name_idx > pos_) {
      Scope t(this, "TypeName");
      while (pos_ < name_idx) consume();
    }
    while (pos_ < end) consume();  // name and any trailing []
  }

  // ---- body / statements ----

  void parse_body() {
    if (is(";")) {
      consume();
      return;
    }
    if (!is("{")) throw LexError("method has no body", cur_line());
    Scope s(this, "MethodBody");
    consume();  // {
    while (!done() && !is("}")) {
      size_t before = pos_;
      statement();
      if (pos_ == before) consume();
    }
    if (done()) throw LexError("unbalanced braces", cur_line());
    consume();  // }
  }

  void block() {
    Scope s(this, "Block");
    expect("{");
    while (!done() && !is("}")) {
      size_t before = pos_;
      statement();
      if (pos_ == before) consume();
    }
    expect("}");
  }

  void statement() {
    if (++depth_ > 400) {  // degrade instead of blowing the stack
      consume();
      --depth_;
      return;
    }
    statement_inner();
    --depth_;
  }

  void statement_inner() {
    if (done()) return;
    const std::string& l = lex();
    if (l == "{") { block(); return; }
    if (l == ";") { consume(); return; }
    if (l == "return") {
      Scope s(this, "ReturnStatement");
      ++return_depth_;
      consume();
      if (!is(";")) expression();
      expect(";");
      --return_depth_;
      return;
    }
    if (l == "if") {
      Scope s(this, "IfStatement");
      consume();
      expect("(");
      expression();
      expect(")");
      statement();
      if (is("else")) {
        consume();
        statement();
      }
      return;
    }
    if (l == "while") {
      Scope s(this, "WhileStatement");
      consume();
      expect("(");
      expression();
      expect(")");
      if (is(";")) consume(); else statement();
      return;
    }
    if (l == "do") {
      Scope s(this, "DoStatement");
      consume();
      statement();
      if (is("while")) {
        consume();
        expect("(");
        expression();
        expect(")");
      }
      expect(";");
      return;
    }
    if (l == "for") { for_statement(); return; }
    if (l == "try") { try_statement(); return; }
    if (l == "throw") {
      Scope s(this, "ThrowStatement");
      consume();
      expression();
      expect(";");
      return;
    }
    if (l == "switch") { switch_statement(); return; }
    if (l == "break" || l == "continue") {
      Scope s(this, l == "break" ? "BreakStatement" : "ContinueStatement");
      consume();
      if (tok() && is_identifier(*tok())) consume();
      expect(";");
      return;
    }
    if (l == "synchronized") {
      Scope s(this, "SynchronizedStatement");
      consume();
      if (is("(")) {
        consume();
        expression();
        expect(")");
      }
      statement();
      return;
    }
    if (l == "assert") {
      Scope s(this, "AssertStatement");
      consume();
      expression();
      if (is(":")) {
        consume();
        expression();
      }
      expect(";");
      return;
    }
    if (l == "class" || l == "interface" || l == "enum") {
      Scope s(this, "ClassBody");  // local class, not modeled further
      while (!done() && !is("{")) consume();
      if (is("{")) consume_balanced("{", "}");
      return;
    }
    if (is("@")) { parse_annotation(); return; }
    if (tok() && is_identifier(*tok()) && is(":", 1) && !is("::", 1)) {
      Scope s(this, "LabeledStatement");
      consume();
      consume();
      statement();
      return;
    }
    if (l == "final" || local_var_decl_ahead()) {
      local_var_decl(true);
      return;
    }
    Scope s(this, "ExpressionStatement");
    expression();
    expect(";");
  }

  bool local_var_decl_ahead() const {
    size_t i = pos_;
    while (i < n() && out_.tokens[i].lexeme == "final") ++i;
    size_t end = scan_type_span(i);
    if (end == i || end >= n()) return false;
    if (!is_identifier(out_.tokens[end])) return false;
    if (end + 1 >= n()) return false;
    const std::string& after = out_.tokens[end + 1].lexeme;
    return after == "=" || after == ";" || after == "," || after == ":" ||
           (after == "[" && end + 2 < n() && out_.tokens[end + 2].lexeme == "]");
  }

  void local_var_decl(bool with_semicolon) {
    Scope s(this, "LocalVariableDeclaration");
    while (is("final") || is("@")) {
      if (is("@")) parse_annotation(); else consume();
    }
    size_t end = scan_type_span(pos_);
    {
      Scope t(this, "TypeName");
      while (pos_ < end) consume();
    }
    while (!done()) {
      {
        Scope d(this, "VariableDeclarator");
        if (tok() && is_identifier(*tok())) consume();
        while (is("[") && is("]", 1)) {
          consume();
          consume();
        }
        if (is("=")) {
          consume();
          if (is("{")) array_initializer(); else expression();
        }
      }
      if (is(",")) {
        consume();
        continue;
      }
      break;
    }
    if (with_semicolon) expect(";");
  }

  void for_statement() {
    Scope s(this, "ForStatement");
    consume();  // for
    expect("(");
    // enhanced for: a ':' before the first ';' at paren depth 0
    bool enhanced = false;
    {
      int depth = 0;
      for (size_t i = pos_; i < n(); ++i) {
        const std::string& g = out_.tokens[i].lexeme;
        if (g == "(") ++depth;
        else if (g == ")") {
          if (depth == 0) break;
          --depth;
        } else if (g == ";" && depth == 0) {
          break;
        } else if (g == ":" && depth == 0) {
          enhanced = true;
          break;
        }
      }
    }
    if (enhanced) {
      Scope c(this, "EnhancedForControl");
      while (is("final") || is("@")) {
        if (is("@")) parse_annotation(); else consume();
      }
      size_t end = scan_type_span(pos_);
      if (end > pos_ && end < n() && is_identifier(out_.tokens[end])) {
        Scope t(this, "TypeName");
        while (pos_ < end) consume();
      }
      if (tok() && is_identifier(*tok())) consume();  // loop variable
      expect(":");
      expression();
    } else {
      Scope c(this, "ForControl");
      if (!is(";")) {
        if (is("final") || local_var_decl_ahead()) local_var_decl(false);
        else expression_list();
      }
      expect(";");
      if (!is(";")) expression();
      expect(";");
      if (!is(")")) expression_list();
    }
    expect(")");
    if (is(";")) consume(); else statement();
  }

  void try_statement() {
    Scope s(this, "TryStatement");
    consume();  // try
    if (is("(")) {
      consume();
      while (!done() && !is(")")) {
        size_t before = pos_;
        {
          Scope r(this, "TryResource");
          if (local_var_decl_ahead() || is("final")) local_var_decl(false);
          else expression();
        }
        if (is(";")) consume();
        if (pos_ == before) consume();
      }
      expect(")");
    }
    block();
    while (is("catch")) {
      Scope c(this, "CatchClause");
      consume();
      expect("(");
      // union types and the exception name: name is the last identifier
      size_t end = pos_;
      size_t name_idx = pos_;
      int depth = 0;
      for (size_t i = pos_; i < n(); ++i) {
        const std::string& g = out_.tokens[i].lexeme;
        if (g == "(") ++depth;
        else if (g == ")") {
          if (depth == 0) { end = i; break; }
          --depth;
        }
        if (is_identifier(out_.tokens[i])) name_idx = i;
        end = i + 1;
      }
      if (name_idx > pos_) {
        Scope t(this, "TypeName");
        while (pos_ < name_idx) consume();
      }
      while (pos_ < end) consume();
      expect(")");
      block();
    }
    if (is("finally")) {
      Scope f(this, "FinallyClause");
      consume();
      block();
    }
  }

  void switch_statement() {
    Scope s(this, "SwitchStatement");
    consume();  // switch
    expect("(");
    expression();
    expect(")");
    expect("{");
    while (!done() && !is("}")) {
      size_t before = pos_;
      if (is("case")) {
        Scope c(this, "SwitchCase");
        consume();
        while (!done() && !is(":")) {
          size_t b = pos_;
          expression();
          if (is(",")) consume();
          if (pos_ == b) consume();
        }
        expect(":");
      } else if (is("default")) {
        Scope c(this, "SwitchCase");
        consume();
        expect(":");
      } else {
        statement();
      }
      if (pos_ == before) consume();
    }
    expect("}");
  }

  void array_initializer() {
    Scope s(this, "ArrayInitializer");
    expect("{");
    while (!done() && !is("}")) {
      size_t before = pos_;
      if (is("{")) array_initializer();
      else expression();
      if (is(",")) consume();
      if (pos_ == before) consume();
    }
    expect("}");
  }

  void expression_list() {
    while (!done()) {
      size_t before = pos_;
      expression();
      if (is(",")) {
        consume();
        continue;
      }
      if (pos_ == before) break;
      break;
    }
  }

  // ---- expressions ----

  void expression() {
    if (++depth_ > 400) {
      consume();
      --depth_;
      return;
    }
    ternary();
    if (!done() && tok()->kind == TokenKind::Operator &&
        is_assignment_op(lex())) {
      Scope s(this, "Assignment");
      consume();
      expression();
    }
    --depth_;
  }

  void ternary() {
    binary(1);
    if (is("?")) {
      Scope s(this, "TernaryExpression");
      consume();
      expression();
      expect(":");
      expression();
    }
  }

  void binary(int min_prec) {
    unary();
    while (!done()) {
      int p = binary_prec(lex());
      if (p < min_prec) break;
      Scope s(this, "BinaryOperation");
      bool inst = is("instanceof");
      consume();  // operator
      if (inst) {
        size_t end = scan_type_span(pos_);
        Scope t(this, "TypeName");
        while (pos_ < end) consume();
      } else {
        binary(p + 1);
      }
    }
  }

  void unary() {
    if (is("+") || is("-") || is("!") || is("~") || is("++") || is("--")) {
      Scope s(this, "UnaryOperation");
      consume();
      unary();
      return;
    }
    if (is("(") && looks_like_cast()) {
      Scope s(this, "Cast");
      consume();  // (
      {
        Scope t(this, "TypeName");
        while (!done() && !is(")")) consume();
      }
      expect(")");
      unary();
      return;
    }
    postfix();
  }

  bool looks_like_cast() const {
    size_t close = pos_ + 1;
    int depth = 1;
    bool plain = true;
    bool primitive = false;
    size_t inner = 0;
    while (close < n()) {
      const std::string& g = out_.tokens[close].lexeme;
      if (g == "(") ++depth;
      else if (g == ")") {
        --depth;
        if (depth == 0) break;
      }
      if (is_identifier(out_.tokens[close]) || g == "." || g == "[" ||
          g == "]" || g == "<" || g == ">" || g == ">>" || g == "&") {
        if (inner == 0 && is_common_java_type(g) &&
            out_.tokens[close].kind == TokenKind::Candidate)
          primitive = true;
      } else {
        plain = false;
      }
      ++inner;
      ++close;
    }
    if (close >= n() || inner == 0 || !plain) return false;
    if (!is_identifier(out_.tokens[pos_ + 1])) return false;
    const RawToken* after = close + 1 < n() ? &out_.tokens[close + 1] : nullptr;
    if (!after) return false;
    bool after_operand = after->kind == TokenKind::Candidate ||
                         after->lexeme == "(" || after->lexeme == "!" ||
                         after->lexeme == "~" || after->lexeme == "new" ||
                         after->lexeme == "this";
    if (!after_operand) return false;
    if (primitive || inner > 1) return true;
    // single non-primitive identifier: (a) + b is arithmetic, (A) x a cast
    return after->kind == TokenKind::Candidate || after->lexeme == "new";
  }

  void postfix() {
    if (done()) return;
    const RawToken& t = *tok();
    if (is("(")) {
      {
        Scope s(this, "ParenthesizedExpression");
        consume();
        while (!done() && !is(")")) {
          size_t before = pos_;
          expression();
          if (is(",")) consume();  // lambda parameter lists
          if (pos_ == before) consume();
        }
        expect(")");
      }
      if (is("->")) {
        Scope s(this, "Lambda");
        consume();
        lambda_body();
        return;
      }
      suffix();
      return;
    }
    if (is("new")) {
      new_expression();
      suffix();
      return;
    }
    if (is("this") || is("super")) {
      consume();
      if (is("(")) {
        Scope s(this, "MethodInvocation");
        call_args();
      }
      suffix();
      return;
    }
    if (t.kind == TokenKind::Candidate) {
      if (is_identifier(t)) {
        if (is("->", 1)) {
          Scope s(this, "Lambda");
          consume();
          consume();
          lambda_body();
          return;
        }
        // scan the dotted chain to see how it terminates
        size_t end = pos_;
        while (end < n() && is_identifier(out_.tokens[end])) {
          if (end + 1 < n() && out_.tokens[end + 1].lexeme == "." &&
              end + 2 < n() && is_identifier(out_.tokens[end + 2]))
            end += 2;
          else
            break;
        }
        bool call = end + 1 < n() && out_.tokens[end + 1].lexeme == "(";
        if (call) {
          Scope s(this, "MethodInvocation");
          while (pos_ <= end) consume();
          call_args();
          if (is("{")) {
            Scope b(this, "ClassBody");
            consume_balanced("{", "}");
          }
        } else if (end > pos_) {
          Scope s(this, "MemberReference");
          while (pos_ <= end) consume();
        } else {
          consume();  // plain identifier, direct child of the context
        }
        suffix();
        return;
      }
      consume();  // literal
      suffix();
      return;
    }
    // anything else: consume in the current context and move on
    consume();
  }

  void new_expression() {
    size_t type_start = pos_ + 1;
    size_t type_end = scan_type_span(type_start);
    const std::string& after =
        type_end < n() ? out_.tokens[type_end].lexeme : std::string();
    if (after == "[" || (type_end > type_start &&
                         out_.tokens[type_end - 1].lexeme == "]")) {
      Scope s(this, "ArrayCreation");
      consume();  // new
      {
        size_t base_end = type_end;
        // the scanned span may include [] pairs; dimensions are handled below
        while (base_end > type_start &&
               (out_.tokens[base_end - 1].lexeme == "]" ||
                out_.tokens[base_end - 1].lexeme == "["))
          --base_end;
        Scope t(this, "TypeName");
        while (pos_ < base_end) consume();
      }
      while (is("[")) {
        consume();
        if (!is("]")) expression();
        expect("]");
      }
      if (is("{")) array_initializer();
      return;
    }
    Scope s(this, "ClassInstanceCreation");
    consume();  // new
    {
      Scope t(this, "TypeName");
      while (pos_ < type_end) consume();
    }
    if (is("(")) call_args();
    if (is("{")) {
      Scope b(this, "ClassBody");
      consume_balanced("{", "}");
    }
  }

  void call_args() {
    consume();  // (
    while (!done() && !is(")")) {
      size_t before = pos_;
      {
        Scope a(this, "Argument");
        expression();
      }
      if (is(",")) consume();
      if (pos_ == before) consume();
    }
    expect(")");
  }

  void lambda_body() {
    if (is("{")) block();
    else expression();
  }

  void suffix() {
    while (!done()) {
      if (is(".")) {
        if (pos_ + 1 < n() && is_identifier(out_.tokens[pos_ + 1])) {
          if (pos_ + 2 < n() && out_.tokens[pos_ + 2].lexeme == "(") {
            Scope s(this, "MethodInvocation");
            consume();  // .
            consume();  // name
            call_args();
          } else {
            consume();
            consume();
          }
          continue;
        }
        consume();
        continue;
      }
      if (is("[")) {
        Scope s(this, "ArrayAccess");
        consume();
        if (!is("]")) expression();
        expect("]");
        continue;
      }
      if (is("++") || is("--")) {
        Scope s(this, "UnaryOperation");
        consume();
        continue;
      }
      if (is("::")) {
        Scope s(this, "MethodReference");
        consume();
        if (!done() && (tok()->kind == TokenKind::Candidate || is("new")))
          consume();
        continue;
      }
      break;
    }
  }
};

}  // namespace

MethodParse parse_method(const std::string& source) {
  return Parser(lex_method(source)).run();
}

std::vector<std::pair<std::string, std::string>> ast_ancestors(
    const std::string& source) {
  return parse_method(source).ancestors;
}

}  // namespace assoc
