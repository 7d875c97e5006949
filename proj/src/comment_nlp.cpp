#include "assoc/comment_nlp.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace assoc {

namespace {

struct Word {
  std::string text;
  bool boundary = false;  // sentence/clause boundary marker
};

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// word TAB tag entries; overridable via load_pos_lexicon
std::unordered_map<std::string, PosTag>& lexicon() {
  static std::unordered_map<std::string, PosTag> lex = [] {
    std::unordered_map<std::string, PosTag> m;
    auto add = [&](PosTag t, std::initializer_list<const char*> words) {
      for (const char* w : words) m[w] = t;
    };
    add(PosTag::Det, {"the", "a", "an", "this", "that", "these", "those",
                      "its", "his", "her", "their", "my", "our", "your",
                      "each", "every", "any", "some", "no", "all", "both",
                      "which", "what", "whose"});
    add(PosTag::Adj, {"current",  "next",     "new",       "given",
                      "specified", "default", "first",     "last",
                      "previous", "maximum",  "minimum",   "max",
                      "min",      "empty",    "full",      "same",
                      "other",    "another",  "certain",   "original",
                      "actual",   "final",    "initial",   "latest",
                      "active",   "total",    "valid",     "invalid",
                      "available", "corresponding", "modified", "single",
                      "multiple", "old",      "largest",   "smallest",
                      "highest",  "lowest",   "greatest",  "least",
                      "whole",    "entire",   "internal",  "external",
                      "local",    "global",   "remote",    "unique",
                      "common",   "underlying", "requested", "expected",
                      "resulting", "selected", "parsed",   "raw"});
    add(PosTag::Verb, {"be", "is", "are", "was", "were", "been", "being",
                       "am", "has", "have", "had", "do", "does", "did",
                       "can", "could", "will", "would", "shall", "should",
                       "may", "might", "must"});
    add(PosTag::Prep, {"of",   "in",    "on",     "for",    "with",
                       "to",   "from",  "by",     "at",     "as",
                       "into", "onto",  "over",   "under",  "within",
                       "without", "about", "against", "between", "during",
                       "after", "before", "up",   "down",   "off",
                       "through", "per", "via",   "than",   "upon"});
    add(PosTag::Conj, {"or", "and", "but", "nor", "when", "while",
                       "if", "whether", "because", "since", "unless",
                       "until", "where", "so", "then", "else",
                       "otherwise"});
    add(PosTag::Pron, {"it", "they", "we", "you", "he", "she", "i",
                       "them", "him", "us", "me", "itself", "there"});
    add(PosTag::Adv, {"not", "already", "also", "only", "just", "never",
                      "always", "currently", "successfully", "again",
                      "now", "here", "too", "very", "n't", "yet",
                      "instead", "rather"});
    return m;
  }();
  return lex;
}

// stems for the -s / -ed / -ing suffix rule
const std::unordered_set<std::string>& verb_stems() {
  static const std::unordered_set<std::string> stems = {
      "return",  "get",      "set",      "read",     "write",   "compute",
      "create",  "check",    "contain",  "exist",    "see",     "use",
      "make",    "find",     "add",      "remove",   "update",  "call",
      "indicate", "represent", "describe", "provide", "hold",   "store",
      "retrieve", "determine", "specify", "denote",   "perform", "throw",
      "build",   "load",     "save",     "delete",   "insert",  "fetch",
      "convert", "parse",    "generate", "produce",  "execute", "run",
      "apply",   "send",     "receive",  "accept",   "reject",  "handle",
      "process", "validate", "verify",   "close",    "open",    "start",
      "stop",    "initialize", "reset",  "clear",    "copy",    "move",
      "append",  "replace",  "match",    "fail",     "succeed", "occur",
      "happen",  "belong",   "refer",    "point",    "correspond",
      "go",      "come",     "take",     "give",     "need",    "want",
      "try",     "allow",    "require",  "become",   "change",  "keep"};
  return stems;
}

bool has_verb_stem(const std::string& w) {
  auto try_stem = [&](const std::string& stem) {
    if (verb_stems().count(stem)) return true;
    return !stem.empty() && verb_stems().count(stem + "e") > 0;
  };
  if (w.size() > 2 && w.back() == 's' && w[w.size() - 2] != 's')
    if (try_stem(w.substr(0, w.size() - 1))) return true;
  if (w.size() > 3 && w.compare(w.size() - 2, 2, "ed") == 0) {
    if (try_stem(w.substr(0, w.size() - 2))) return true;
    // doubled consonant: stopped -> stop
    std::string s = w.substr(0, w.size() - 2);
    if (s.size() > 1 && s[s.size() - 1] == s[s.size() - 2] &&
        verb_stems().count(s.substr(0, s.size() - 1)))
      return true;
  }
  if (w.size() > 4 && w.compare(w.size() - 3, 3, "ing") == 0) {
    if (try_stem(w.substr(0, w.size() - 3))) return true;
    std::string s = w.substr(0, w.size() - 3);
    if (s.size() > 1 && s[s.size() - 1] == s[s.size() - 2] &&
        verb_stems().count(s.substr(0, s.size() - 1)))
      return true;
  }
  return false;
}

bool code_like(const std::string& w) {
  if (w.find('.') != std::string::npos) return true;
  if (w.find("()") != std::string::npos) return true;
  if (w.find('_') != std::string::npos) return true;
  for (size_t i = 1; i < w.size(); ++i) {
    if (std::islower(static_cast<unsigned char>(w[i - 1])) &&
        std::isupper(static_cast<unsigned char>(w[i])))
      return true;
  }
  return false;
}

std::vector<Word> tokenize_words(const std::string& text) {
  std::vector<Word> out;
  const size_t n = text.size();
  size_t i = 0;
  auto is_wordc = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
  };
  while (i < n) {
    char c = text[i];
    if (is_wordc(c)) {
      size_t j = i;
      std::string w;
      while (j < n) {
        if (is_wordc(text[j])) {
          w.push_back(text[j]);
          ++j;
        } else if (text[j] == '.' && j + 1 < n && is_wordc(text[j + 1])) {
          w.push_back('.');  // dotted identifier
          ++j;
        } else if (text[j] == '(' && j + 1 < n && text[j + 1] == ')') {
          w += "()";
          j += 2;
        } else {
          break;
        }
      }
      out.push_back({std::move(w), false});
      i = j;
      continue;
    }
    if (c == '.' || c == ';' || c == ',' || c == ':' || c == '!' || c == '?') {
      if (out.empty() || !out.back().boundary) out.push_back({".", true});
      ++i;
      continue;
    }
    ++i;
  }
  return out;
}

struct Span {
  size_t begin, end;  // word indices, end exclusive
};

std::vector<Span> chunk_spans(const std::vector<Word>& words) {
  std::vector<Span> spans;
  size_t i = 0;
  const size_t n = words.size();
  while (i < n) {
    if (words[i].boundary) {
      ++i;
      continue;
    }
    PosTag t = pos_tag(words[i].text);
    bool starts = t == PosTag::Det || t == PosTag::Adj || t == PosTag::Noun;
    if (!starts) {
      ++i;
      continue;
    }
    size_t begin = i;
    if (t == PosTag::Det) ++i;
    size_t last_noun = std::string::npos;
    while (i < n && !words[i].boundary) {
      PosTag wt = pos_tag(words[i].text);
      if (wt == PosTag::Noun) {
        last_noun = i;
        ++i;
      } else if (wt == PosTag::Adj) {
        ++i;
      } else {
        break;
      }
    }
    if (last_noun != std::string::npos)
      spans.push_back({begin, last_noun + 1});
    if (i == begin) ++i;
  }
  return spans;
}

std::string strip_block_markers(const std::string& line) {
  std::string s = line;
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  s = s.substr(b);
  if (s.rfind("/**", 0) == 0) s = s.substr(3);
  while (!s.empty() && (s[0] == '*' || s[0] == ' ' || s[0] == '\t')) {
    if (s[0] == '*' && s.size() >= 2 && s[1] == '/') break;
    s = s.substr(1);
  }
  size_t close = s.find("*/");
  if (close != std::string::npos) s = s.substr(0, close);
  return s;
}

std::string collapse_ws(const std::string& s) {
  std::string out;
  std::istringstream ss(s);
  std::string w;
  while (ss >> w) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

PosTag pos_tag(const std::string& word) {
  if (code_like(word)) return PosTag::Noun;
  std::string lw = lowercase(word);
  auto it = lexicon().find(lw);
  if (it != lexicon().end()) return it->second;
  if (has_verb_stem(lw)) return PosTag::Verb;
  return PosTag::Noun;
}

void load_pos_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open POS lexicon: " + path);
  std::unordered_map<std::string, PosTag> fresh;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos) continue;
    std::string word = lowercase(line.substr(0, tab));
    std::string tag = line.substr(tab + 1);
    PosTag t = PosTag::Noun;
    if (tag == "DET") t = PosTag::Det;
    else if (tag == "ADJ") t = PosTag::Adj;
    else if (tag == "NOUN") t = PosTag::Noun;
    else if (tag == "VERB") t = PosTag::Verb;
    else if (tag == "PREP") t = PosTag::Prep;
    else if (tag == "CONJ") t = PosTag::Conj;
    else if (tag == "PRON") t = PosTag::Pron;
    else if (tag == "ADV") t = PosTag::Adv;
    fresh[word] = t;
  }
  lexicon() = std::move(fresh);
}

ReturnComment extract_return_comment(const std::string& javadoc) {
  ReturnComment rc;
  rc.raw = javadoc;
  std::istringstream in(javadoc);
  std::string line;
  bool collecting = false;
  std::string text;
  while (std::getline(in, line)) {
    std::string s = strip_block_markers(line);
    if (collecting) {
      if (!s.empty() && s[0] == '@') break;  // next tag
      text += ' ' + s;
      continue;
    }
    size_t at = s.find("@return");
    if (at != std::string::npos) {
      collecting = true;
      text = s.substr(at + 7);
    }
  }
  rc.return_text = collapse_ws(text);
  rc.nps = chunk_noun_phrases(rc.return_text);
  return rc;
}

std::vector<NounPhrase> chunk_noun_phrases(const std::string& text) {
  std::vector<NounPhrase> out;
  auto words = tokenize_words(text);
  for (const Span& sp : chunk_spans(words)) {
    std::string np_text;
    for (size_t i = sp.begin; i < sp.end; ++i) {
      if (!np_text.empty()) np_text += ' ';
      np_text += words[i].text;
    }
    out.push_back(NounPhrase::from_text(np_text));
  }
  return out;
}

bool detect_verb_change(const std::string& before_text,
                        const std::string& after_text) {
  auto before = tokenize_words(before_text);
  auto after = tokenize_words(after_text);
  auto lower_of = [](const std::vector<Word>& ws) {
    std::vector<std::string> out;
    out.reserve(ws.size());
    for (const auto& w : ws) out.push_back(lowercase(w.text));
    return out;
  };
  std::vector<std::string> a = lower_of(before), b = lower_of(after);
  // LCS alignment over lowercased words
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);
  std::vector<bool> a_matched(n, false), b_matched(m, false);
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      a_matched[i] = b_matched[j] = true;
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  auto in_any_span = [](const std::vector<Span>& spans, size_t idx) {
    for (const auto& s : spans)
      if (idx >= s.begin && idx < s.end) return true;
    return false;
  };
  auto spans_a = chunk_spans(before);
  auto spans_b = chunk_spans(after);
  for (size_t k = 0; k < n; ++k) {
    if (a_matched[k] || before[k].boundary) continue;
    if (pos_tag(before[k].text) == PosTag::Verb && !in_any_span(spans_a, k))
      return true;
  }
  for (size_t k = 0; k < m; ++k) {
    if (b_matched[k] || after[k].boundary) continue;
    if (pos_tag(after[k].text) == PosTag::Verb && !in_any_span(spans_b, k))
      return true;
  }
  return false;
}

}  // namespace assoc
