#ifndef ASSOC_MINER_HPP
#define ASSOC_MINER_HPP

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "assoc/comment_nlp.hpp"
#include "assoc/core.hpp"

namespace assoc {

/// One method version: its Javadoc block and full method source.
struct MethodVersion {
  std::string javadoc;
  std::string source;
};

/// Before/after versions of one method in one commit.
struct CommitPair {
  std::string project;
  std::string sha;
  std::string file_path;
  std::string method_name;
  int param_count = 0;
  std::optional<MethodVersion> before;
  std::optional<MethodVersion> after;
  int diff_line_count = 0;  // changed lines in this file's diff
};

/// A method declaration found in a Java source file.
struct FoundMethod {
  std::string javadoc;  // empty when the method has no /** */ block
  std::string source;   // signature + body
  std::string name;
  int param_count = 0;
};

/// Scans a Java file for Javadoc'd method declarations. Bodyless
/// (abstract/interface) methods are skipped.
std::vector<FoundMethod> find_methods(const std::string& file_content);

/// Walks the commit history of a repository clone and yields one
/// CommitPair per method whose body or Javadoc changed in a commit.
/// Methods are matched across versions by (file path, name, arity).
void walk_commits(const std::string& repo_path, const std::string& project_name,
                  const std::function<void(const CommitPair&)>& sink,
                  std::vector<std::string>* skip_log = nullptr);

/// Set-style diff of normalized NP texts, order preserving.
std::pair<std::vector<std::string>, std::vector<std::string>> diff_nps(
    const ReturnComment& before, const ReturnComment& after);

/// LCS alignment over lexemes; unmatched candidate lexemes only.
std::pair<std::vector<std::string>, std::vector<std::string>> diff_code_tokens(
    const std::vector<RawToken>& before_tokens,
    const std::vector<RawToken>& after_tokens);

/// Builds the addition and/or deletion example a commit pair supports.
std::vector<Example> build_examples(const CommitPair& pair);

/// True iff the token diff touches a return statement or the declared
/// return type differs between the two versions. Throws on unparseable
/// sides.
bool return_change_check(const CommitPair& pair);

/// LCS match flags over two string sequences (true = kept on both sides).
std::pair<std::vector<bool>, std::vector<bool>> lcs_match(
    const std::vector<std::string>& a, const std::vector<std::string>& b);

}  // namespace assoc

#endif
