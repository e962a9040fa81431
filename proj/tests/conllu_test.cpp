#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "depshift/conllu.hpp"

using namespace depshift;

namespace {

const char* kTwoTokens =
    "1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
    "2\tplane\tplane\tNOUN\t_\t_\t0\troot\t_\t_\n";

}  // namespace

TEST(ParseDocument, EmptyInput) {
  EXPECT_TRUE(parse_document(std::string_view("")).empty());
  EXPECT_TRUE(parse_document(std::string_view("\n\n")).empty());
}

TEST(ParseDocument, TwoTokenBlock) {
  const auto sents = parse_document(std::string_view(kTwoTokens));
  ASSERT_EQ(sents.size(), 1u);
  ASSERT_EQ(sents[0].tokens.size(), 2u);
  EXPECT_EQ(sents[0].tokens[0].head, 2);
  EXPECT_EQ(sents[0].tokens[1].head, 0);
  EXPECT_EQ(sents[0].tokens[0].deprel, "det");
  EXPECT_EQ(sents[0].tokens[1].lemma, "plane");
  EXPECT_EQ(sents[0].tokens[1].upos, "NOUN");
}

TEST(ParseDocument, SkipsMalformedMiddleSentence) {
  // Lines: 1 comment, 2-3 tokens, 4 blank, 5 comment, 6 good, 7 bad HEAD,
  // 8 blank, 9 comment, 10-11 tokens.
  const std::string text =
      "# sent_id = s1\n" + std::string(kTwoTokens) + "\n" +
      "# sent_id = s2\n"
      "1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_\n"
      "2\tgraft\tgraft\tNOUN\t_\t_\tX\troot\t_\t_\n"
      "\n"
      "# sent_id = s3\n" + std::string(kTwoTokens);
  std::vector<ParseError> errors;
  const auto sents = parse_document(std::string_view(text), ErrorPolicy::skip, &errors);
  ASSERT_EQ(sents.size(), 2u);
  EXPECT_EQ(sents[0].source_id, "s1");
  EXPECT_EQ(sents[1].source_id, "s3");
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].line, 7u);
  EXPECT_NE(errors[0].message.find("HEAD"), std::string::npos);
}

TEST(ParseDocument, WrongColumnCountIsAnError) {
  const std::string text = "1\tthe\tthe\tDET\t_\t_\t2\tdet\n2\tplane\tplane\tNOUN\t_\t_\t0\troot\t_\t_\n";
  std::vector<ParseError> errors;
  EXPECT_TRUE(parse_document(std::string_view(text), ErrorPolicy::skip, &errors).empty());
  ASSERT_EQ(errors.size(), 1u);
  EXPECT_EQ(errors[0].line, 1u);
}

TEST(ParseDocument, StrictPolicyThrowsWithLine) {
  const std::string text = std::string(kTwoTokens) + "\n1\tx\tx\tX\t_\t_\t?\tdep\t_\t_\n";
  try {
    parse_document(std::string_view(text), ErrorPolicy::strict);
    FAIL() << "expected ConlluError";
  } catch (const ConlluError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseDocument, DropsRangesAndEmptyNodes) {
  const std::string text =
      "1-2\tdu\t_\t_\t_\t_\t_\t_\t_\t_\n"
      "1\tde\tde\tADP\t_\t_\t3\tcase\t_\t_\n"
      "2\tle\tle\tDET\t_\t_\t3\tdet\t_\t_\n"
      "3\tpain\tpain\tNOUN\t_\t_\t0\troot\t_\t_\n"
      "3.1\tx\tx\tX\t_\t_\t_\t_\t_\t_\n";
  const auto sents = parse_document(std::string_view(text));
  ASSERT_EQ(sents.size(), 1u);
  ASSERT_EQ(sents[0].tokens.size(), 3u);
  EXPECT_TRUE(validate_sentence(sents[0]).empty());
}

TEST(ParseDocument, CrlfAndTrailingBlockWithoutNewline) {
  const std::string text =
      "1\tthe\tthe\tDET\t_\t_\t2\tdet\t_\t_\r\n2\tplane\tplane\tNOUN\t_\t_\t0\troot\t_\t_";
  const auto sents = parse_document(std::string_view(text));
  ASSERT_EQ(sents.size(), 1u);
  EXPECT_EQ(sents[0].tokens[0].deprel, "det");
  EXPECT_EQ(sents[0].tokens[1].deprel, "root");
}

TEST(ReaderIsLazy, YieldsOneSentenceAtATime) {
  std::istringstream in(std::string(kTwoTokens) + "\n" + kTwoTokens);
  ConlluReader reader(lines_from(in));
  ASSERT_TRUE(reader.next().has_value());
  EXPECT_EQ(reader.lines_read(), 3u);
  ASSERT_TRUE(reader.next().has_value());
  EXPECT_FALSE(reader.next().has_value());
}

TEST(ValidateSentence, HeadOutOfRange) {
  Sentence s;
  s.tokens = {{1, "a", "a", "X", 2, "dep"}, {2, "b", "b", "X", 0, "root"}, {3, "c", "c", "X", 5, "dep"}};
  const auto v = validate_sentence(s);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::head_out_of_range);
  EXPECT_EQ(v[0].token_index, 3);
}

TEST(ValidateSentence, WellFormed) {
  EXPECT_TRUE(validate_sentence(parse_document(std::string_view(kTwoTokens))[0]).empty());
}

TEST(ValidateSentence, SelfLoopAndEmptyFields) {
  Sentence s;
  s.tokens = {{1, "a", "", "X", 1, ""}};
  const auto v = validate_sentence(s);
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0].kind, ViolationKind::self_loop);
  EXPECT_EQ(v[1].kind, ViolationKind::empty_lemma);
  EXPECT_EQ(v[2].kind, ViolationKind::empty_deprel);
}

TEST(ReadLines, GzipAndPlainFilesGiveTheSameSentences) {
  const std::string dir = ::testing::TempDir();
  const std::string plain = dir + "/plain.conllu";
  const std::string gz = dir + "/packed.conllu.gz";
  const std::string text = std::string(kTwoTokens) + "\n" + kTwoTokens;
  {
    std::ofstream f(plain);
    f << text;
  }
  {
    gzFile f = gzopen(gz.c_str(), "wb");
    ASSERT_NE(f, nullptr);
    gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
    gzclose(f);
  }
  auto read_all = [](const std::string& path) {
    ConlluReader r(open_lines(path));
    std::vector<Sentence> out;
    while (auto s = r.next()) out.push_back(*s);
    return out;
  };
  const auto a = read_all(plain);
  const auto b = read_all(gz);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a, b);
}

TEST(ReadLines, MissingFileThrows) {
  EXPECT_THROW(open_lines("/nonexistent/corpus.conllu"), std::runtime_error);
}

// Serializing the retained columns and parsing again gives the same sentence.
TEST(Property, RoundTripOnRetainedFields) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> lemmas = {"plane", "Lyzeum", "cut", "ärger", "the", "nsubj"};
  const std::vector<std::string> tags = {"NOUN", "VERB", "ADJ", "PROPN", "DET"};
  const std::vector<std::string> rels = {"amod", "nsubj:pass", "obj", "det", "punct"};
  for (int trial = 0; trial < 200; ++trial) {
    Sentence s;
    s.source_id = trial % 3 == 0 ? "" : "doc" + std::to_string(trial);
    const int n = 1 + static_cast<int>(rng() % 12);
    const int root = 1 + static_cast<int>(rng() % n);
    for (int i = 1; i <= n; ++i) {
      Token t;
      t.index = i;
      t.lemma = lemmas[rng() % lemmas.size()];
      t.form = t.lemma + "s";
      t.upos = tags[rng() % tags.size()];
      if (i == root) {
        t.head = 0;
        t.deprel = "root";
      } else {
        do t.head = 1 + static_cast<int>(rng() % n); while (t.head == i);
        t.deprel = rels[rng() % rels.size()];
      }
      s.tokens.push_back(t);
    }
    const auto back = parse_document(std::string_view(write_conllu(s)), ErrorPolicy::strict);
    ASSERT_EQ(back.size(), 1u);
    EXPECT_EQ(back[0], s);
  }
}
