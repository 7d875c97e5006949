#include "assoc/core.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace assoc {

using json = nlohmann::ordered_json;

std::string to_string(TokenKind k) {
  switch (k) {
    case TokenKind::Candidate: return "candidate";
    case TokenKind::JavaKeyword: return "java_keyword";
    case TokenKind::Operator: return "operator";
    case TokenKind::Symbol: return "symbol";
  }
  return "candidate";
}

std::string to_string(Label l) {
  switch (l) {
    case Label::Associated: return "associated";
    case Label::NotAssociated: return "not_associated";
    case Label::Java: return "java";
  }
  return "java";
}

std::string to_string(ExampleSource s) {
  return s == ExampleSource::Addition ? "addition" : "deletion";
}

TokenKind token_kind_from_string(const std::string& s) {
  if (s == "candidate") return TokenKind::Candidate;
  if (s == "java_keyword") return TokenKind::JavaKeyword;
  if (s == "operator") return TokenKind::Operator;
  if (s == "symbol") return TokenKind::Symbol;
  throw std::runtime_error("unknown token kind: " + s);
}

Label label_from_string(const std::string& s) {
  if (s == "associated") return Label::Associated;
  if (s == "not_associated") return Label::NotAssociated;
  if (s == "java") return Label::Java;
  throw std::runtime_error("unknown label: " + s);
}

ExampleSource source_from_string(const std::string& s) {
  if (s == "addition") return ExampleSource::Addition;
  if (s == "deletion") return ExampleSource::Deletion;
  throw std::runtime_error("unknown source: " + s);
}

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream ss(s);
  std::string w;
  while (ss >> w) out.push_back(w);
  return out;
}

}  // namespace

NounPhrase NounPhrase::from_text(const std::string& text) {
  NounPhrase np;
  np.text = text;
  // subtokens come from the original casing; lowercasing first would hide
  // camel-case boundaries
  for (const auto& w : split_ws(text)) {
    np.words.push_back(lowercase(w));
    for (const auto& st : subtokenize(w)) np.subtokens.push_back(st);
  }
  for (char c : lowercase(text))
    if (!std::isspace(static_cast<unsigned char>(c)))
      np.chars.push_back(std::string(1, c));
  return np;
}

std::vector<Violation> validate_example(const Example& e) {
  std::vector<Violation> v;
  if (e.np.words.empty()) {
    v.push_back({"np-words-empty", -1});
  } else {
    std::string joined;
    for (size_t i = 0; i < e.np.words.size(); ++i) {
      if (i) joined += ' ';
      joined += e.np.words[i];
    }
    std::string norm;
    for (const auto& w : split_ws(e.np.text)) {
      if (!norm.empty()) norm += ' ';
      norm += lowercase(w);
    }
    if (joined != norm) v.push_back({"np-words-text-mismatch", -1});
    std::vector<std::string> expect_sub;
    for (const auto& w : split_ws(e.np.text))
      for (const auto& st : subtokenize(w)) expect_sub.push_back(st);
    if (expect_sub != e.np.subtokens) v.push_back({"np-subtokens-mismatch", -1});
  }
  bool any_assoc = false;
  for (size_t i = 0; i < e.tokens.size(); ++i) {
    const CodeToken& t = e.tokens[i];
    if (t.lexeme.empty()) v.push_back({"empty-lexeme", t.position});
    if (t.position != static_cast<int>(i))
      v.push_back({"positions-not-contiguous", t.position});
    bool is_java = t.label == Label::Java;
    bool is_cand = t.kind == TokenKind::Candidate;
    if (is_java == is_cand) v.push_back({"label-kind-mismatch", t.position});
    if (t.label == Label::Associated) any_assoc = true;
  }
  if (!any_assoc) v.push_back({"no-associated-token", -1});
  // literal-string propagation closure, common Java types exempt
  std::unordered_set<std::string> assoc_lexemes;
  for (const auto& t : e.tokens)
    if (t.label == Label::Associated) assoc_lexemes.insert(t.lexeme);
  for (const auto& t : e.tokens) {
    if (t.kind != TokenKind::Candidate || t.label != Label::NotAssociated)
      continue;
    if (is_common_java_type(t.lexeme)) continue;
    if (assoc_lexemes.count(t.lexeme)) v.push_back({"propagation", t.position});
  }
  return v;
}

std::string example_to_json_line(const Example& e) {
  json j;
  j["id"] = e.id;
  j["project"] = e.project;
  j["commit_sha"] = e.commit_sha;
  j["source"] = to_string(e.source);
  j["np"] = {{"text", e.np.text}, {"words", e.np.words}};
  j["comment_text"] = e.comment_text;
  j["method_line_count"] = e.method_line_count;
  if (e.annotated) j["annotated"] = true;
  json toks = json::array();
  for (const auto& t : e.tokens) {
    toks.push_back({{"lexeme", t.lexeme},
                    {"kind", to_string(t.kind)},
                    {"line_index", t.line_index},
                    {"position", t.position},
                    {"parent_node_type", t.parent_node_type},
                    {"grandparent_node_type", t.grandparent_node_type},
                    {"label", to_string(t.label)}});
  }
  j["tokens"] = std::move(toks);
  if (e.meta) {
    j["meta"] = {{"diff_line_count", e.meta->diff_line_count},
                 {"return_change", e.meta->return_change},
                 {"verb_change", e.meta->verb_change},
                 {"reformat", e.meta->reformat},
                 {"typo", e.meta->typo},
                 {"rephrase", e.meta->rephrase}};
  }
  return j.dump();
}

Example example_from_json_line(const std::string& line) {
  json j = json::parse(line);
  for (const char* field : {"id", "project", "commit_sha", "source", "np",
                            "comment_text", "method_line_count", "tokens"}) {
    if (!j.contains(field))
      throw std::runtime_error(std::string("missing field '") + field + "'");
  }
  Example e;
  e.id = j["id"].get<std::string>();
  e.project = j["project"].get<std::string>();
  e.commit_sha = j["commit_sha"].get<std::string>();
  e.source = source_from_string(j["source"].get<std::string>());
  const auto& np = j["np"];
  if (!np.contains("text")) throw std::runtime_error("missing field 'np.text'");
  e.np = NounPhrase::from_text(np["text"].get<std::string>());
  e.comment_text = j["comment_text"].get<std::string>();
  e.method_line_count = j["method_line_count"].get<int>();
  e.annotated = j.value("annotated", false);
  for (const auto& tj : j["tokens"]) {
    CodeToken t;
    t.lexeme = tj.at("lexeme").get<std::string>();
    t.kind = token_kind_from_string(tj.at("kind").get<std::string>());
    t.line_index = tj.at("line_index").get<int>();
    t.position = tj.at("position").get<int>();
    t.parent_node_type = tj.at("parent_node_type").get<std::string>();
    t.grandparent_node_type = tj.at("grandparent_node_type").get<std::string>();
    t.label = label_from_string(tj.at("label").get<std::string>());
    e.tokens.push_back(std::move(t));
  }
  if (j.contains("meta")) {
    MinedMeta m;
    const auto& mj = j["meta"];
    m.diff_line_count = mj.value("diff_line_count", 0);
    m.return_change = mj.value("return_change", false);
    m.verb_change = mj.value("verb_change", false);
    m.reformat = mj.value("reformat", false);
    m.typo = mj.value("typo", false);
    m.rephrase = mj.value("rephrase", false);
    e.meta = m;
  }
  return e;
}

DatasetPartition load_dataset(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);
  DatasetPartition d;
  d.name = name;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Example e;
    try {
      e = example_from_json_line(line);
    } catch (const std::exception& ex) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " +
                               ex.what());
    }
    if (!seen_ids.insert(e.id).second)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": duplicate example id '" + e.id + "'");
    auto violations = validate_example(e);
    if (!violations.empty())
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": invalid example (" + violations[0].name + ")");
    d.examples.push_back(std::move(e));
  }
  return d;
}

void save_dataset(const DatasetPartition& d, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (const auto& e : d.examples) out << example_to_json_line(e) << "\n";
}

uint64_t fnv1a64(const std::string& data) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool np_token_match(const NounPhrase& np, const std::string& lexeme) {
  std::string low = lowercase(lexeme);
  auto hit = [&](const std::string& piece) {
    for (const auto& w : np.words)
      if (w == piece) return true;
    for (const auto& st : np.subtokens)
      if (st == piece) return true;
    return false;
  };
  if (hit(low)) return true;
  for (const auto& st : subtokenize(lexeme))
    if (hit(st)) return true;
  return false;
}

std::string make_example_id(const std::string& project, const std::string& sha,
                            ExampleSource source, const std::string& signature) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(signature)));
  return project + "/" + sha + "/" + to_string(source) + "/" + buf;
}

}  // namespace assoc
