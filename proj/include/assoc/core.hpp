#ifndef ASSOC_CORE_HPP
#define ASSOC_CORE_HPP

#include <optional>
#include <string>
#include <vector>

#include "assoc/java_lex.hpp"

namespace assoc {

enum class Label { Associated, NotAssociated, Java };
enum class ExampleSource { Addition, Deletion };

std::string to_string(TokenKind k);
std::string to_string(Label l);
std::string to_string(ExampleSource s);
TokenKind token_kind_from_string(const std::string& s);
Label label_from_string(const std::string& s);
ExampleSource source_from_string(const std::string& s);

/// A comment noun phrase with its word, subword, and character views.
struct NounPhrase {
  std::string text;
  std::vector<std::string> words;      // lowercased
  std::vector<std::string> subtokens;  // camel-case split of words
  std::vector<std::string> chars;      // lowercased, whitespace dropped

  static NounPhrase from_text(const std::string& text);
};

struct CodeToken {
  std::string lexeme;
  TokenKind kind = TokenKind::Candidate;
  int line_index = 0;
  int position = 0;
  std::string parent_node_type = kNodeOther;
  std::string grandparent_node_type = kNodeOther;
  Label label = Label::Java;
};

/// Flags computed at mining time and consumed by the filter stage; not
/// part of the clean dataset schema.
struct MinedMeta {
  int diff_line_count = 0;
  bool return_change = false;
  bool verb_change = false;
  bool reformat = false;
  bool typo = false;
  bool rephrase = false;
};

/// One (NP, labeled candidate-token sequence) pair with provenance.
struct Example {
  std::string id;
  std::string project;
  std::string commit_sha;
  ExampleSource source = ExampleSource::Addition;
  NounPhrase np;
  std::string comment_text;  // full @return text
  std::vector<CodeToken> tokens;
  int method_line_count = 0;
  bool annotated = false;  // gold labels are human-verified
  std::optional<MinedMeta> meta;
};

struct Violation {
  std::string name;
  int position = -1;  // offending token position, -1 when example-level
};

/// Checks every Example and CodeToken invariant. Violations are data,
/// not errors; an empty result means the example is well formed.
std::vector<Violation> validate_example(const Example& e);

struct DatasetPartition {
  std::string name;  // train | validation | test | deletions
  std::vector<Example> examples;
};

/// Line-delimited records, one example per line, UTF-8. Loading
/// validates each example and reports the offending line on failure.
DatasetPartition load_dataset(const std::string& path,
                              const std::string& name = "");
void save_dataset(const DatasetPartition& d, const std::string& path);

std::string example_to_json_line(const Example& e);
Example example_from_json_line(const std::string& line);

/// Deterministic id: project "/" sha "/" source "/" signature hash.
std::string make_example_id(const std::string& project, const std::string& sha,
                            ExampleSource source, const std::string& signature);

uint64_t fnv1a64(const std::string& data);

/// Case-insensitive token/subtoken match between an NP and a lexeme:
/// the lexeme or any of its subtokens equals any NP word or NP subtoken.
bool np_token_match(const NounPhrase& np, const std::string& lexeme);

}  // namespace assoc

#endif
