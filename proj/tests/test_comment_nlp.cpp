#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "assoc/comment_nlp.hpp"

using namespace assoc;

namespace {

std::vector<std::string> np_texts(const std::vector<NounPhrase>& nps) {
  std::vector<std::string> out;
  for (const auto& np : nps) out.push_back(np.text);
  return out;
}

bool contains_np(const std::vector<NounPhrase>& nps, const std::string& text) {
  for (const auto& np : nps)
    if (np.text == text) return true;
  return false;
}

}  // namespace

TEST_CASE("@return text is pulled out of the block") {
  ReturnComment rc = extract_return_comment(
      "/**\n"
      " * Advances to the next bytecode and returns\n"
      " * its opcode.\n"
      " * @return the opcode of the current bytecode\n"
      " */");
  CHECK(rc.return_text == "the opcode of the current bytecode");
  CHECK(rc.return_text.find('*') == std::string::npos);
  CHECK(rc.return_text.find("@") == std::string::npos);
}

TEST_CASE("@return text runs to the next tag") {
  ReturnComment rc = extract_return_comment(
      "/**\n"
      " * Checks a name.\n"
      " * @param beanName the name\n"
      " * @return true if beanName already exists in\n"
      " *         the factory\n"
      " * @throws IllegalStateException never\n"
      " */");
  CHECK(rc.return_text == "true if beanName already exists in the factory");
}

TEST_CASE("multi-line @return text is joined") {
  ReturnComment rc = extract_return_comment(
      "/* @return Snapshot or null when there are problems\n"
      "   reading it. */");
  CHECK(rc.return_text == "Snapshot or null when there are problems reading it.");
}

TEST_CASE("missing tag gives an empty result") {
  ReturnComment rc = extract_return_comment("/** Just a description. */");
  CHECK(rc.return_text.empty());
  CHECK(rc.nps.empty());
}

TEST_CASE("prepositional phrases split into separate NPs") {
  auto nps = chunk_noun_phrases("the opcode of the current bytecode");
  CHECK(np_texts(nps) ==
        std::vector<std::string>{"the opcode", "the current bytecode"});
}

TEST_CASE("empty text chunks to nothing") {
  CHECK(chunk_noun_phrases("").empty());
}

TEST_CASE("conjunctions and verbs bound NPs") {
  auto nps =
      chunk_noun_phrases("Snapshot or null when there are problems reading it");
  CHECK(contains_np(nps, "problems"));
  CHECK(contains_np(nps, "Snapshot"));
  CHECK_FALSE(contains_np(nps, "Snapshot or null"));
}

TEST_CASE("NP spans are ordered and non-overlapping") {
  auto nps = chunk_noun_phrases(
      "a String representing the current active version of the config");
  REQUIRE(nps.size() >= 2);
  // every NP's words appear in order; simple containment check on texts
  std::string text = "a String representing the current active version of the config";
  size_t cursor = 0;
  for (const auto& np : nps) {
    size_t at = text.find(np.text, cursor);
    REQUIRE(at != std::string::npos);
    cursor = at + np.text.size();
  }
}

TEST_CASE("code-like words count as nouns") {
  auto nps = chunk_noun_phrases("the SaveStepExecutionRes");
  CHECK(contains_np(nps, "the SaveStepExecutionRes"));
  auto dotted = chunk_noun_phrases("a ConfigRepo.Snapshot instance");
  REQUIRE_FALSE(dotted.empty());
  CHECK(dotted[0].text.find("ConfigRepo.Snapshot") != std::string::npos);
}

TEST_CASE("chunker is total over odd inputs") {
  CHECK_NOTHROW(chunk_noun_phrases("   "));
  CHECK_NOTHROW(chunk_noun_phrases("@#$%"));
  CHECK_NOTHROW(chunk_noun_phrases("or and or"));
  CHECK_NOTHROW(chunk_noun_phrases("."));
}

TEST_CASE("verb change detection") {
  CHECK(detect_verb_change("returns the value", "computes the value"));
  CHECK_FALSE(detect_verb_change("returns the value", "returns the value"));
  // adjective change inside the NP is not a verb change
  CHECK_FALSE(detect_verb_change("the opcode of the next bytecode",
                                 "the opcode of the current bytecode"));
}

TEST_CASE("pos tagging basics") {
  CHECK(pos_tag("the") == PosTag::Det);
  CHECK(pos_tag("current") == PosTag::Adj);
  CHECK(pos_tag("returns") == PosTag::Verb);
  CHECK(pos_tag("reading") == PosTag::Verb);
  CHECK(pos_tag("or") == PosTag::Conj);
  CHECK(pos_tag("bytecode") == PosTag::Noun);     // unknown -> noun
  CHECK(pos_tag("currentBC") == PosTag::Noun);    // code-like -> noun
  CHECK(pos_tag("get()") == PosTag::Noun);
}

TEST_CASE("the shipped lexicon file mirrors the built-in table") {
  auto nps_before = chunk_noun_phrases("the opcode of the current bytecode");
  load_pos_lexicon(ASSOC_POS_LEXICON);
  CHECK(pos_tag("the") == PosTag::Det);
  CHECK(pos_tag("current") == PosTag::Adj);
  CHECK(pos_tag("of") == PosTag::Prep);
  CHECK(pos_tag("or") == PosTag::Conj);
  CHECK(pos_tag("bytecode") == PosTag::Noun);
  auto nps_after = chunk_noun_phrases("the opcode of the current bytecode");
  REQUIRE(nps_after.size() == nps_before.size());
  for (size_t i = 0; i < nps_after.size(); ++i)
    CHECK(nps_after[i].text == nps_before[i].text);
}

TEST_CASE("a replacement lexicon changes tagging") {
  namespace fs = std::filesystem;
  std::string path = (fs::temp_directory_path() / "assoc_lex.txt").string();
  {
    std::ofstream out(path);
    out << "# comment line\n";
    out << "frobnicate\tVERB\n";
    out << "the\tDET\n";
  }
  load_pos_lexicon(path);
  CHECK(pos_tag("frobnicate") == PosTag::Verb);
  CHECK(pos_tag("the") == PosTag::Det);
  CHECK(pos_tag("current") == PosTag::Noun);  // no longer listed
  std::remove(path.c_str());
  CHECK_THROWS(load_pos_lexicon(path));
  load_pos_lexicon(ASSOC_POS_LEXICON);  // restore the real table
  CHECK(pos_tag("current") == PosTag::Adj);
}
