#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "assoc/miner.hpp"

using namespace assoc;
namespace fs = std::filesystem;

namespace {

const char* kBeforeJavadoc =
    "/**\n"
    " * Advances to the next bytecode and returns\n"
    " * its opcode.\n"
    " * @return the opcode of the next bytecode\n"
    " */";

const char* kAfterJavadoc =
    "/**\n"
    " * Advances to the next bytecode and returns\n"
    " * its opcode.\n"
    " * @return the opcode of the current bytecode\n"
    " */";

const char* kBeforeMethod =
    "public int next() {\n"
    "    setBCI(_nextBCI);\n"
    "    return currentBC();\n"
    "}";

const char* kAfterMethod =
    "public int next() {\n"
    "    final int opcode = currentBC();\n"
    "    setBCI(_nextBCI);\n"
    "    return opcode;\n"
    "}";

CommitPair figure_pair() {
  CommitPair pair;
  pair.project = "maxine";
  pair.sha = "deadbeef";
  pair.file_path = "BytecodeScanner.java";
  pair.method_name = "next";
  pair.before = MethodVersion{kBeforeJavadoc, kBeforeMethod};
  pair.after = MethodVersion{kAfterJavadoc, kAfterMethod};
  pair.diff_line_count = 4;
  return pair;
}

std::multiset<std::string> labeled(const Example& e, Label label) {
  std::multiset<std::string> out;
  for (const auto& t : e.tokens)
    if (t.label == label) out.insert(t.lexeme);
  return out;
}

// --- synthetic repository helpers ---

struct TempRepo {
  fs::path dir;
  TempRepo() {
    dir = fs::temp_directory_path() /
          ("assoc_miner_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    git("init -q -b main");
    git("config user.name t");
    git("config user.email t@example.com");
  }
  ~TempRepo() { fs::remove_all(dir); }
  void git(const std::string& args) {
    std::string cmd = "git -C " + dir.string() + " " + args + " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
  }
  void write(const std::string& rel, const std::string& content) {
    std::ofstream out(dir / rel);
    out << content;
  }
  void commit(const std::string& msg) {
    git("add -A");
    git("commit -q -m '" + msg + "'");
  }
};

std::string wrap_class(const std::string& javadoc, const std::string& method) {
  return "public class Scanner {\n" + javadoc + "\n" + method + "\n}\n";
}

}  // namespace

TEST_CASE("find_methods pairs javadoc with the following method") {
  std::string file = wrap_class(kAfterJavadoc, kAfterMethod);
  auto methods = find_methods(file);
  REQUIRE(methods.size() == 1);
  CHECK(methods[0].name == "next");
  CHECK(methods[0].param_count == 0);
  CHECK(methods[0].javadoc.find("@return") != std::string::npos);
  CHECK(methods[0].source.find("setBCI") != std::string::npos);
}

TEST_CASE("find_methods skips bodyless declarations") {
  auto methods = find_methods(
      "public interface I {\n"
      "/** @return a thing */\n"
      "int get();\n"
      "/** @return a value */\n"
      "default int val() { return 1; }\n"
      "}\n");
  REQUIRE(methods.size() == 1);
  CHECK(methods[0].name == "val");
}

TEST_CASE("lcs_match flags kept tokens on both sides") {
  auto [bm, am] = lcs_match({"a", "b", "c"}, {"a", "x", "c"});
  CHECK(bm == std::vector<bool>{true, false, true});
  CHECK(am == std::vector<bool>{true, false, true});
}

TEST_CASE("np diff is a set difference in order") {
  ReturnComment before = extract_return_comment(kBeforeJavadoc);
  ReturnComment after = extract_return_comment(kAfterJavadoc);
  auto [deleted, added] = diff_nps(before, after);
  CHECK(deleted == std::vector<std::string>{"the next bytecode"});
  CHECK(added == std::vector<std::string>{"the current bytecode"});

  auto [none_d, none_a] = diff_nps(after, after);
  CHECK(none_d.empty());
  CHECK(none_a.empty());
}

TEST_CASE("code token diff on the two versions of next()") {
  auto [deleted, added] =
      diff_code_tokens(lex_method(kBeforeMethod), lex_method(kAfterMethod));
  CHECK(std::multiset<std::string>(deleted.begin(), deleted.end()) ==
        std::multiset<std::string>{"currentBC"});
  CHECK(std::multiset<std::string>(added.begin(), added.end()) ==
        std::multiset<std::string>{"int", "opcode", "opcode", "currentBC"});
}

TEST_CASE("token diff of identical sequences is empty") {
  auto toks = lex_method(kAfterMethod);
  auto [deleted, added] = diff_code_tokens(toks, toks);
  CHECK(deleted.empty());
  CHECK(added.empty());
}

TEST_CASE("single substitution inside a return") {
  auto [deleted, added] = diff_code_tokens(lex_method("int f() { return a; }"),
                                           lex_method("int f() { return b; }"));
  CHECK(deleted == std::vector<std::string>{"a"});
  CHECK(added == std::vector<std::string>{"b"});
}

TEST_CASE("the commit yields the addition and deletion examples") {
  auto examples = build_examples(figure_pair());
  REQUIRE(examples.size() == 2);

  const Example& add = examples[0].source == ExampleSource::Addition
                           ? examples[0]
                           : examples[1];
  const Example& del = examples[0].source == ExampleSource::Deletion
                           ? examples[0]
                           : examples[1];

  CHECK(add.np.text == "the current bytecode");
  CHECK(labeled(add, Label::Associated) ==
        std::multiset<std::string>{"int", "opcode", "opcode", "currentBC"});
  CHECK(labeled(add, Label::NotAssociated) ==
        std::multiset<std::string>{"int", "next", "setBCI", "_nextBCI"});

  CHECK(del.np.text == "the next bytecode");
  CHECK(labeled(del, Label::Associated) ==
        std::multiset<std::string>{"currentBC"});
  auto del_not = labeled(del, Label::NotAssociated);
  CHECK(del_not.count("_nextBCI") == 1);

  for (const auto& e : examples) {
    CHECK(validate_example(e).empty());
    CHECK(e.meta.has_value());
    CHECK(e.meta->return_change);
    CHECK_FALSE(e.meta->verb_change);
    CHECK(e.id.find("maxine/deadbeef/") == 0);
  }
}

TEST_CASE("two added NPs disqualify the addition side") {
  CommitPair pair = figure_pair();
  pair.after->javadoc =
      "/** @return the current bytecode or the frame pointer */";
  auto examples = build_examples(pair);
  for (const auto& e : examples)
    CHECK(e.source == ExampleSource::Deletion);
}

TEST_CASE("no added candidate lexemes yields nothing for the addition") {
  CommitPair pair = figure_pair();
  pair.after->source = kBeforeMethod;  // comment changed, code identical
  auto examples = build_examples(pair);
  for (const auto& e : examples)
    CHECK(e.source == ExampleSource::Deletion);
}

TEST_CASE("single-sided pairs yield nothing") {
  CommitPair pair = figure_pair();
  pair.before.reset();
  CHECK(build_examples(pair).empty());
}

TEST_CASE("return_change_check sees the return statement edit") {
  CHECK(return_change_check(figure_pair()));

  CommitPair quiet = figure_pair();
  quiet.before->source =
      "public int next() {\n    setBCI(_nextBCI);\n    return currentBC();\n}";
  quiet.after->source =
      "public int next() {\n    setBCI(_nextBCI, extra);\n    return currentBC();\n}";
  CHECK_FALSE(return_change_check(quiet));
}

TEST_CASE("walk_commits replays the history") {
  TempRepo repo;
  repo.write("Scanner.java", wrap_class(kBeforeJavadoc, kBeforeMethod));
  repo.write("README.md", "scanner\n");
  repo.commit("add scanner");

  repo.write("README.md", "scanner docs\n");
  repo.commit("update readme only");

  repo.write("Scanner.java", wrap_class(kAfterJavadoc, kAfterMethod));
  repo.commit("fix next()");

  std::vector<CommitPair> pairs;
  std::vector<std::string> skips;
  walk_commits(repo.dir.string(), "maxine",
               [&](const CommitPair& p) { pairs.push_back(p); }, &skips);

  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0].method_name == "next");
  CHECK(pairs[0].before.has_value());
  CHECK(pairs[0].after.has_value());
  CHECK(pairs[0].diff_line_count > 0);
  // the initial commit has no parent version of the file
  REQUIRE(skips.size() == 1);
  CHECK(skips[0].find("missing-before-version") != std::string::npos);

  auto examples = build_examples(pairs[0]);
  CHECK(examples.size() == 2);
}

TEST_CASE("two methods changed in one commit give two pairs") {
  TempRepo repo;
  std::string v1 =
      "public class Two {\n"
      "/** @return the left value */\n"
      "public int left() { return a; }\n"
      "/** @return the right value */\n"
      "public int right() { return b; }\n"
      "}\n";
  std::string v2 =
      "public class Two {\n"
      "/** @return the left limit */\n"
      "public int left() { return leftLimit; }\n"
      "/** @return the right limit */\n"
      "public int right() { return rightLimit; }\n"
      "}\n";
  repo.write("Two.java", v1);
  repo.commit("v1");
  repo.write("Two.java", v2);
  repo.commit("v2");

  std::vector<CommitPair> pairs;
  walk_commits(repo.dir.string(), "two",
               [&](const CommitPair& p) { pairs.push_back(p); });
  CHECK(pairs.size() == 2);
}

TEST_CASE("unreadable repository is fatal") {
  CHECK_THROWS(walk_commits("/nonexistent/repo", "x", [](const CommitPair&) {}));
}
