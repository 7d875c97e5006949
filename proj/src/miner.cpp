#include "assoc/miner.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "assoc/java_ast.hpp"

namespace assoc {

namespace {

std::string run_cmd(const std::string& cmd, int* exit_code = nullptr) {
  std::string out;
  FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) throw std::runtime_error("failed to run: " + cmd);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  int rc = pclose(pipe);
  if (exit_code) *exit_code = rc;
  return out;
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  out += "'";
  return out;
}

std::vector<std::string> split_lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string normalize_np(const std::string& s) {
  std::istringstream in(lowercase(s));
  std::string w, out;
  while (in >> w) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

// Changed-line count via line multiset difference; cheap and good enough
// for the "many diff lines" threshold.
int changed_line_count(const std::string& before, const std::string& after) {
  std::unordered_map<std::string, int> counts;
  for (const auto& l : split_lines(before)) ++counts[l];
  for (const auto& l : split_lines(after)) --counts[l];
  int changed = 0;
  for (const auto& [line, c] : counts) changed += std::abs(c);
  return changed;
}

size_t skip_ws_and_comments(const std::string& s, size_t i) {
  const size_t n = s.size();
  while (i < n) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      ++i;
    } else if (s[i] == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
    } else {
      break;
    }
  }
  return i;
}

// Advances past annotations (@Name, optionally with a balanced argument
// list) between a Javadoc block and the declaration it documents.
size_t skip_annotations(const std::string& s, size_t i) {
  const size_t n = s.size();
  while (true) {
    i = skip_ws_and_comments(s, i);
    if (i >= n || s[i] != '@') return i;
    ++i;
    while (i < n && (std::isalnum(static_cast<unsigned char>(s[i])) ||
                     s[i] == '_' || s[i] == '.'))
      ++i;
    i = skip_ws_and_comments(s, i);
    if (i < n && s[i] == '(') {
      int depth = 0;
      while (i < n) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') {
          --depth;
          if (depth == 0) {
            ++i;
            break;
          }
        }
        ++i;
      }
    }
  }
}

// Finds the end (inclusive of '}') of a brace-balanced body starting at
// the given '{', skipping strings, chars, and comments.
size_t match_brace(const std::string& s, size_t open) {
  const size_t n = s.size();
  int depth = 0;
  size_t i = open;
  while (i < n) {
    char c = s[i];
    if (c == '"' || c == '\'') {
      char q = c;
      ++i;
      while (i < n && s[i] != q) {
        if (s[i] == '\\') ++i;
        ++i;
      }
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(s[i] == '*' && s[i + 1] == '/')) ++i;
      i += 2;
      continue;
    }
    if (c == '{') ++depth;
    if (c == '}') {
      --depth;
      if (depth == 0) return i;
    }
    ++i;
  }
  return std::string::npos;
}

}  // namespace

std::vector<FoundMethod> find_methods(const std::string& file_content) {
  std::vector<FoundMethod> out;
  const std::string& s = file_content;
  const size_t n = s.size();
  size_t i = 0;
  while (i < n) {
    size_t doc = s.find("/**", i);
    if (doc == std::string::npos) break;
    size_t doc_end = s.find("*/", doc + 3);
    if (doc_end == std::string::npos) break;
    doc_end += 2;
    std::string javadoc = s.substr(doc, doc_end - doc);
    size_t decl = skip_annotations(s, doc_end);
    i = doc_end;
    if (decl >= n) break;
    // the declaration must be a method: '(' before any '{', ';' or '='
    size_t paren = std::string::npos;
    size_t j = decl;
    int angle = 0;
    while (j < n) {
      char c = s[j];
      if (c == '<') ++angle;
      else if (c == '>') --angle;
      else if (c == '(' && angle <= 0) {
        paren = j;
        break;
      } else if (c == '{' || c == ';' || c == '=' || c == '/') {
        break;
      }
      ++j;
    }
    if (paren == std::string::npos) continue;
    std::string head = s.substr(decl, paren - decl);
    if (head.find(" class ") != std::string::npos ||
        head.rfind("class ", 0) == 0 ||
        head.find("interface ") != std::string::npos ||
        head.find(" enum ") != std::string::npos)
      continue;
    // name = identifier directly before '('
    size_t name_end = paren;
    while (name_end > decl &&
           std::isspace(static_cast<unsigned char>(s[name_end - 1])))
      --name_end;
    size_t name_begin = name_end;
    while (name_begin > decl &&
           (std::isalnum(static_cast<unsigned char>(s[name_begin - 1])) ||
            s[name_begin - 1] == '_' || s[name_begin - 1] == '$'))
      --name_begin;
    if (name_begin == name_end) continue;
    std::string name = s.substr(name_begin, name_end - name_begin);
    // param count: top-level commas inside the parens
    size_t close = paren;
    int depth = 0;
    int commas = 0;
    bool nonempty = false;
    while (close < n) {
      char c = s[close];
      if (c == '(') ++depth;
      else if (c == ')') {
        --depth;
        if (depth == 0) break;
      } else if (c == ',' && depth == 1) {
        ++commas;
      } else if (depth >= 1 && !std::isspace(static_cast<unsigned char>(c))) {
        nonempty = true;
      }
      ++close;
    }
    if (close >= n) continue;
    // body
    size_t k = close + 1;
    int d2 = 0;
    size_t open = std::string::npos;
    while (k < n) {
      char c = s[k];
      if (c == ';' && d2 == 0) break;  // abstract, no body
      if (c == '{') {
        open = k;
        break;
      }
      ++k;
    }
    if (open == std::string::npos) continue;
    size_t body_end = match_brace(s, open);
    if (body_end == std::string::npos) continue;
    FoundMethod m;
    m.javadoc = std::move(javadoc);
    m.source = s.substr(decl, body_end + 1 - decl);
    m.name = std::move(name);
    m.param_count = nonempty ? commas + 1 : 0;
    out.push_back(std::move(m));
    i = body_end + 1;
  }
  return out;
}

std::pair<std::vector<bool>, std::vector<bool>> lcs_match(
    const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> dp(n + 1, std::vector<int>(m + 1, 0));
  for (size_t i = n; i-- > 0;)
    for (size_t j = m; j-- > 0;)
      dp[i][j] = a[i] == b[j] ? dp[i + 1][j + 1] + 1
                              : std::max(dp[i + 1][j], dp[i][j + 1]);
  std::vector<bool> ma(n, false), mb(m, false);
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    if (a[i] == b[j]) {
      ma[i] = mb[j] = true;
      ++i;
      ++j;
    } else if (dp[i + 1][j] >= dp[i][j + 1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return {std::move(ma), std::move(mb)};
}

std::pair<std::vector<std::string>, std::vector<std::string>> diff_nps(
    const ReturnComment& before, const ReturnComment& after) {
  auto collect = [](const ReturnComment& rc) {
    std::vector<std::string> out;
    for (const auto& np : rc.nps) out.push_back(normalize_np(np.text));
    return out;
  };
  auto b = collect(before), a = collect(after);
  std::vector<std::string> deleted, added;
  for (const auto& x : b)
    if (std::find(a.begin(), a.end(), x) == a.end() &&
        std::find(deleted.begin(), deleted.end(), x) == deleted.end())
      deleted.push_back(x);
  for (const auto& x : a)
    if (std::find(b.begin(), b.end(), x) == b.end() &&
        std::find(added.begin(), added.end(), x) == added.end())
      added.push_back(x);
  return {deleted, added};
}

std::pair<std::vector<std::string>, std::vector<std::string>> diff_code_tokens(
    const std::vector<RawToken>& before_tokens,
    const std::vector<RawToken>& after_tokens) {
  std::vector<std::string> a, b;
  for (const auto& t : before_tokens) a.push_back(t.lexeme);
  for (const auto& t : after_tokens) b.push_back(t.lexeme);
  auto [ma, mb] = lcs_match(a, b);
  std::vector<std::string> deleted, added;
  for (size_t i = 0; i < a.size(); ++i)
    if (!ma[i] && before_tokens[i].kind == TokenKind::Candidate)
      deleted.push_back(a[i]);
  for (size_t j = 0; j < b.size(); ++j)
    if (!mb[j] && after_tokens[j].kind == TokenKind::Candidate)
      added.push_back(b[j]);
  return {deleted, added};
}

namespace {

int count_lines(const std::string& s) {
  if (s.empty()) return 0;
  int lines = 1;
  for (char c : s)
    if (c == '\n') ++lines;
  return lines;
}

// True when any unmatched token lies inside a return statement or the
// declared return type differs between versions.
bool return_change(const MethodParse& before, const std::vector<bool>& bm,
                   const MethodParse& after, const std::vector<bool>& am) {
  for (size_t i = 0; i < before.tokens.size(); ++i)
    if (!bm[i] && before.in_return[i]) return true;
  for (size_t i = 0; i < after.tokens.size(); ++i)
    if (!am[i] && after.in_return[i]) return true;
  auto type_of = [](const MethodParse& p) {
    std::string t;
    for (int pos : p.return_type_positions) t += p.tokens[pos].lexeme + " ";
    return t;
  };
  return type_of(before) != type_of(after);
}

std::vector<std::string> comment_words(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(lowercase(text));
  std::string w;
  while (in >> w) out.push_back(w);
  return out;
}

int edit_distance(const std::string& a, const std::string& b) {
  const size_t n = a.size(), m = b.size();
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

Example assemble_example(const CommitPair& pair, ExampleSource source,
                         const MethodParse& parse,
                         const std::vector<bool>& matched,
                         const NounPhrase& np, const std::string& comment_text,
                         const std::string& method_source,
                         const MinedMeta& meta) {
  Example e;
  e.project = pair.project;
  e.commit_sha = pair.sha;
  e.source = source;
  e.np = np;
  e.comment_text = comment_text;
  e.method_line_count = count_lines(method_source);
  e.meta = meta;
  std::string sig = pair.file_path + ":" + pair.method_name + "/" +
                    std::to_string(pair.param_count);
  e.id = make_example_id(pair.project, pair.sha, source, sig);
  for (size_t i = 0; i < parse.tokens.size(); ++i) {
    const RawToken& rt = parse.tokens[i];
    CodeToken t;
    t.lexeme = rt.lexeme;
    t.kind = rt.kind;
    t.line_index = rt.line_index;
    t.position = static_cast<int>(i);
    t.parent_node_type = parse.ancestors[i].first;
    t.grandparent_node_type = parse.ancestors[i].second;
    if (rt.kind != TokenKind::Candidate)
      t.label = Label::Java;
    else
      t.label = matched[i] ? Label::NotAssociated : Label::Associated;
    e.tokens.push_back(std::move(t));
  }
  // literal-string propagation, common Java types exempt
  std::map<std::string, bool> assoc;
  for (const auto& t : e.tokens)
    if (t.label == Label::Associated) assoc[t.lexeme] = true;
  for (auto& t : e.tokens) {
    if (t.kind != TokenKind::Candidate || t.label == Label::Associated) continue;
    if (is_common_java_type(t.lexeme)) continue;
    if (assoc.count(t.lexeme)) t.label = Label::Associated;
  }
  return e;
}

}  // namespace

bool return_change_check(const CommitPair& pair) {
  if (!pair.before || !pair.after)
    throw std::runtime_error("return_change_check needs both versions");
  MethodParse before = parse_method(pair.before->source);
  MethodParse after = parse_method(pair.after->source);
  std::vector<std::string> blex, alex;
  for (const auto& t : before.tokens) blex.push_back(t.lexeme);
  for (const auto& t : after.tokens) alex.push_back(t.lexeme);
  auto [bm, am] = lcs_match(blex, alex);
  return return_change(before, bm, after, am);
}

std::vector<Example> build_examples(const CommitPair& pair) {
  std::vector<Example> out;
  if (!pair.before || !pair.after) return out;
  ReturnComment rc_before, rc_after;
  MethodParse before_parse, after_parse;
  try {
    rc_before = extract_return_comment(pair.before->javadoc);
    rc_after = extract_return_comment(pair.after->javadoc);
    before_parse = parse_method(pair.before->source);
    after_parse = parse_method(pair.after->source);
  } catch (const LexError&) {
    return out;  // unparseable version; caller logs the skip
  }
  auto [deleted_nps, added_nps] = diff_nps(rc_before, rc_after);

  std::vector<std::string> blex, alex;
  for (const auto& t : before_parse.tokens) blex.push_back(t.lexeme);
  for (const auto& t : after_parse.tokens) alex.push_back(t.lexeme);
  auto [bmatch, amatch] = lcs_match(blex, alex);

  MinedMeta meta;
  meta.diff_line_count = pair.diff_line_count;
  meta.return_change = return_change(before_parse, bmatch, after_parse, amatch);
  meta.verb_change =
      detect_verb_change(rc_before.return_text, rc_after.return_text);
  {
    auto bw = comment_words(rc_before.return_text);
    auto aw = comment_words(rc_after.return_text);
    auto sorted = [](std::vector<std::string> v) {
      std::sort(v.begin(), v.end());
      return v;
    };
    auto bsl = sorted(blex), asl = sorted(alex);
    meta.reformat = sorted(bw) == sorted(aw) && bsl == asl;
    meta.rephrase = bw != aw && deleted_nps.empty() && added_nps.empty();
    auto [wm_b, wm_a] = lcs_match(bw, aw);
    std::vector<std::string> changed_b, changed_a;
    for (size_t i = 0; i < bw.size(); ++i)
      if (!wm_b[i]) changed_b.push_back(bw[i]);
    for (size_t i = 0; i < aw.size(); ++i)
      if (!wm_a[i]) changed_a.push_back(aw[i]);
    meta.typo = !changed_b.empty() && changed_b.size() == changed_a.size();
    for (size_t i = 0; meta.typo && i < changed_b.size(); ++i)
      if (edit_distance(changed_b[i], changed_a[i]) > 2) meta.typo = false;
  }

  auto has_added_candidate = [](const MethodParse& p,
                                const std::vector<bool>& m) {
    for (size_t i = 0; i < p.tokens.size(); ++i)
      if (!m[i] && p.tokens[i].kind == TokenKind::Candidate) return true;
    return false;
  };

  if (added_nps.size() == 1 && has_added_candidate(after_parse, amatch)) {
    NounPhrase np;
    for (const auto& cand : rc_after.nps)
      if (normalize_np(cand.text) == added_nps[0]) {
        np = cand;
        break;
      }
    if (np.text.empty()) np = NounPhrase::from_text(added_nps[0]);
    out.push_back(assemble_example(pair, ExampleSource::Addition, after_parse,
                                   amatch, np, rc_after.return_text,
                                   pair.after->source, meta));
  }
  if (deleted_nps.size() == 1 && has_added_candidate(before_parse, bmatch)) {
    NounPhrase np;
    for (const auto& cand : rc_before.nps)
      if (normalize_np(cand.text) == deleted_nps[0]) {
        np = cand;
        break;
      }
    if (np.text.empty()) np = NounPhrase::from_text(deleted_nps[0]);
    out.push_back(assemble_example(pair, ExampleSource::Deletion, before_parse,
                                   bmatch, np, rc_before.return_text,
                                   pair.before->source, meta));
  }
  return out;
}

void walk_commits(const std::string& repo_path, const std::string& project_name,
                  const std::function<void(const CommitPair&)>& sink,
                  std::vector<std::string>* skip_log) {
  const std::string git = "git -C " + shell_quote(repo_path) + " ";
  int rc = 0;
  std::string log = run_cmd(git + "log --reverse --first-parent --format=%H", &rc);
  if (rc != 0) throw std::runtime_error("not a readable git repository: " + repo_path);
  auto shas = split_lines(log);
  for (const auto& sha : shas) {
    std::string files =
        run_cmd(git + "diff-tree --root --no-commit-id --name-only -r " + sha);
    for (const auto& path : split_lines(files)) {
      if (path.size() < 5 || path.compare(path.size() - 5, 5, ".java") != 0)
        continue;
      int rc_b = 0, rc_a = 0;
      std::string before_content =
          run_cmd(git + "show " + sha + "^:" + shell_quote(path), &rc_b);
      std::string after_content =
          run_cmd(git + "show " + sha + ":" + shell_quote(path), &rc_a);
      if (rc_b != 0 || rc_a != 0) {
        if (skip_log && rc_b != 0)
          skip_log->push_back(sha + " " + path + " missing-before-version");
        continue;
      }
      int diff_lines = changed_line_count(before_content, after_content);
      auto before_methods = find_methods(before_content);
      auto after_methods = find_methods(after_content);
      auto key = [](const FoundMethod& m) {
        return m.name + "/" + std::to_string(m.param_count);
      };
      std::map<std::string, const FoundMethod*> before_by_key;
      for (const auto& m : before_methods) before_by_key.emplace(key(m), &m);
      for (const auto& m : after_methods) {
        auto it = before_by_key.find(key(m));
        if (it == before_by_key.end()) continue;
        const FoundMethod& b = *it->second;
        if (b.source == m.source && b.javadoc == m.javadoc) continue;
        CommitPair pair;
        pair.project = project_name;
        pair.sha = sha;
        pair.file_path = path;
        pair.method_name = m.name;
        pair.param_count = m.param_count;
        pair.before = MethodVersion{b.javadoc, b.source};
        pair.after = MethodVersion{m.javadoc, m.source};
        pair.diff_line_count = diff_lines;
        sink(pair);
      }
    }
  }
}

}  // namespace assoc
