#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "atomsplit/metrics.hpp"
#include "oracles.hpp"

using namespace atomsplit;

namespace {

using Words = std::vector<std::string>;
using oracles::oracle_rouge_l;
using oracles::oracle_rouge_n;
using oracles::oracle_semantic;

TokenEmbeddings embed(const std::vector<std::vector<double>>& rows) {
  TokenEmbeddings e;
  e.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.at(0).size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    e.tokens.push_back("t" + std::to_string(i));
    for (std::size_t k = 0; k < rows[i].size(); ++k) e.vectors(i, k) = rows[i][k];
  }
  return e;
}

AtomicSentence atom(const std::string& text) {
  AtomicSentence a;
  a.text = text;
  a.source_sent_id = "x";
  return a;
}

Words words(std::initializer_list<const char*> w) { return {w.begin(), w.end()}; }

void expect_score(const Score& s, double p, double r, double f, double tol = 1e-4) {
  EXPECT_NEAR(s.precision, p, tol);
  EXPECT_NEAR(s.recall, r, tol);
  EXPECT_NEAR(s.f1, f, tol);
}

const Words kApple = words({"anna", "ate", "an", "apple"});
const Words kBoth = words({"anna", "ate", "an", "apple", "and", "a", "banana"});

}  // namespace

TEST(Tokenize, LowercasesAndDropsPunctuation) {
  EXPECT_EQ(metric_tokenize("Anna sang."), words({"anna", "sang"}));
  EXPECT_TRUE(metric_tokenize("").empty());
  EXPECT_EQ(metric_tokenize("marks & co. was located"), words({"marks", "co", "was", "located"}));
  EXPECT_EQ(metric_tokenize("Greenland's 12'' vinyl"), words({"greenland's", "12", "vinyl"}));
  EXPECT_EQ(metric_tokenize("GÖRTZ, five-story"), words({"görtz", "five", "story"}));
  EXPECT_TRUE(metric_tokenize(" , . ; ").empty());
}

TEST(Rouge, UnigramExample) {
  expect_score(rouge_n(kApple, kApple, 1), 1, 1, 1, 1e-12);
  expect_score(rouge_n(kApple, kBoth, 1), 1.0, 4.0 / 7.0, 0.7273);
}

TEST(Rouge, BigramExample) { expect_score(rouge_n(kApple, kBoth, 2), 1.0, 0.5, 0.6667); }

TEST(Rouge, LcsExample) {
  EXPECT_EQ(lcs_length(kApple, kBoth), 4u);
  expect_score(rouge_l(kApple, kBoth), 1.0, 4.0 / 7.0, 0.7273);
  expect_score(rouge_l(kBoth, kBoth), 1, 1, 1, 1e-12);
  expect_score(rouge_l(words({"x", "y"}), words({"p", "q"})), 0, 0, 0, 0);
}

TEST(Rouge, EmptySides) {
  const Words none;
  expect_score(rouge_n(none, none, 1), 1, 1, 1, 0);
  expect_score(rouge_n(none, kApple, 1), 0, 0, 0, 0);
  expect_score(rouge_n(kApple, none, 1), 0, 0, 0, 0);
  expect_score(rouge_l(none, none), 1, 1, 1, 0);
  expect_score(rouge_l(kApple, none), 0, 0, 0, 0);
  // One token each: no bigram on either side.
  expect_score(rouge_n(words({"a"}), words({"b"}), 2), 1, 1, 1, 0);
  EXPECT_THROW(rouge_n(kApple, kApple, 3), Error);
}

TEST(Rouge, ClipsRepeatedNgrams) {
  expect_score(rouge_n(words({"the", "the", "the"}), words({"the", "cat"}), 1), 1.0 / 3.0, 0.5, 0.4, 1e-12);
}

TEST(Rouge, MatchesBruteForceOnRandomPairs) {
  std::mt19937 rng(20240611);
  const Words vocab = words({"a", "b", "c", "d", "e", "f"});
  std::uniform_int_distribution<std::size_t> len(0, 12);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    Words x(len(rng));
    Words y(len(rng));
    for (auto& w : x) w = vocab[pick(rng)];
    for (auto& w : y) w = vocab[pick(rng)];
    for (int n : {1, 2}) {
      const Score got = rouge_n(x, y, n);
      const Score want = oracle_rouge_n(x, y, n);
      EXPECT_NEAR(got.precision, want.precision, 1e-9);
      EXPECT_NEAR(got.recall, want.recall, 1e-9);
      EXPECT_NEAR(got.f1, want.f1, 1e-9);
    }
    const Score got = rouge_l(x, y);
    const Score want = oracle_rouge_l(x, y);
    EXPECT_NEAR(got.precision, want.precision, 1e-9);
    EXPECT_NEAR(got.recall, want.recall, 1e-9);
    EXPECT_NEAR(got.f1, want.f1, 1e-9);
  }
}

TEST(Rouge, SwappingSidesSwapsPrecisionAndRecall) {
  std::mt19937 rng(3);
  const Words vocab = words({"a", "b", "c", "d"});
  std::uniform_int_distribution<std::size_t> len(1, 9);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    Words x(len(rng));
    Words y(len(rng));
    for (auto& w : x) w = vocab[pick(rng)];
    for (auto& w : y) w = vocab[pick(rng)];
    for (const auto& [xy, yx] : {std::pair{rouge_n(x, y, 1), rouge_n(y, x, 1)},
                                 std::pair{rouge_n(x, y, 2), rouge_n(y, x, 2)},
                                 std::pair{rouge_l(x, y), rouge_l(y, x)}}) {
      EXPECT_DOUBLE_EQ(xy.precision, yx.recall);
      EXPECT_DOUBLE_EQ(xy.recall, yx.precision);
      EXPECT_GE(xy.f1, 0.0);
      EXPECT_LE(xy.f1, 1.0);
      if (xy.precision > 0 && xy.recall > 0) {
        EXPECT_GE(xy.f1, std::min(xy.precision, xy.recall) - 1e-12);
        EXPECT_LE(xy.f1, std::max(xy.precision, xy.recall) + 1e-12);
      }
    }
    expect_score(rouge_n(x, x, 1), 1, 1, 1, 0);
  }
}

TEST(ScoreType, HarmonicMean) {
  const Score s = Score::from(0.5, 1.0);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(Score::from(0, 0), Score::zero());
  EXPECT_EQ(Score::from(1, 1), Score::perfect());
}

TEST(Semantic, Examples) {
  const auto e1e2 = embed({{1, 0}, {0, 1}});
  const auto e1 = embed({{1, 0}});
  expect_score(semantic_score(e1e2, e1), 0.5, 1.0, 0.6667);
  expect_score(semantic_score(e1e2, e1e2), 1, 1, 1, 1e-9);
  EXPECT_NEAR(semantic_score(embed({{0, 1}}), e1).precision, 0.0, 1e-12);
  // Opposite vectors floor at zero rather than going negative.
  expect_score(semantic_score(embed({{-1, 0}}), e1), 0, 0, 0, 1e-12);
}

TEST(Semantic, RejectsBadInput) {
  EXPECT_THROW(semantic_score(embed({{1, 0}}), embed({{1, 0, 0}})), Error);
  TokenEmbeddings empty;
  EXPECT_THROW(semantic_score(empty, embed({{1, 0}})), Error);
  EXPECT_THROW(embed({{0.5, 0.5}}).validate(), Error);
  EXPECT_NO_THROW(embed({{0.6, 0.8}}).validate());
}

TEST(Semantic, MatchesBruteForceOnRandomMatrices) {
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<int> size(1, 6);
  std::uniform_int_distribution<int> dim(2, 7);
  auto rows = [&](int n, int d) {
    std::vector<std::vector<double>> out(n, std::vector<double>(d));
    for (auto& v : out) {
      double norm = 0;
      for (auto& x : v) {
        x = gauss(rng);
        norm += x * x;
      }
      for (auto& x : v) x /= std::sqrt(norm);
    }
    return out;
  };
  for (int trial = 0; trial < 200; ++trial) {
    const int d = dim(rng);
    const auto c = rows(size(rng), d);
    const auto r = rows(size(rng), d);
    const Score got = semantic_score(embed(c), embed(r));
    const Score want = oracle_semantic(c, r);
    EXPECT_NEAR(got.precision, want.precision, 1e-9);
    EXPECT_NEAR(got.recall, want.recall, 1e-9);
    EXPECT_NEAR(got.f1, want.f1, 1e-9);
  }
}

TEST(Embeddings, ReadsJsonLines) {
  std::istringstream in(
      "{\"id\":\"s1#p1\",\"tokens\":[\"a\",\"b\"],\"vectors\":[[1,0],[0,1]]}\n\n"
      "{\"id\":\"s1#g1\",\"tokens\":[\"a\"],\"vectors\":[[0.6,0.8]]}\n");
  const auto index = read_embeddings(in);
  ASSERT_EQ(index.size(), 2u);
  EXPECT_EQ(index.at("s1#p1").dim(), 2);
  EXPECT_EQ(index.at("s1#g1").tokens, words({"a"}));
}

TEST(Embeddings, ErrorsNameTheLine) {
  auto fails_with = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_embeddings(in);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const Error& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  const std::string ok = "{\"id\":\"a\",\"tokens\":[\"x\"],\"vectors\":[[1,0]]}\n";
  fails_with(ok + "{not json\n", "line 2");
  fails_with(ok + ok, "duplicate");
  fails_with("{\"id\":\"a\",\"tokens\":[\"x\"],\"vectors\":[[2,0]]}\n", "line 1");
  fails_with("{\"id\":\"a\",\"tokens\":[\"x\",\"y\"],\"vectors\":[[1,0]]}\n", "line 1");
  fails_with("{\"id\":\"a\",\"tokens\":[\"x\",\"y\"],\"vectors\":[[1,0],[1]]}\n", "line 1");
  fails_with(ok + "{\"id\":\"b\",\"tokens\":[\"x\"],\"vectors\":[[1,0,0]]}\n", "dimension");
}

TEST(Align, ForcedAndIdentityPairings) {
  const std::vector<AtomicSentence> one{atom("anna sang")};
  const std::vector<std::string> gold_one{"alice danced"};
  const auto forced = align_atoms(one, gold_one);
  ASSERT_EQ(forced.size(), 1u);
  EXPECT_TRUE(forced[0].matched());

  const std::vector<AtomicSentence> pred{atom("anna ate an apple"), atom("anna ate a banana")};
  const std::vector<std::string> gold{"anna ate an apple", "anna ate a banana"};
  const auto pairs = align_atoms(pred, gold);
  ASSERT_EQ(pairs.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(pairs[i].predicted_index, i);
    EXPECT_EQ(pairs[i].gold_index, i);
    EXPECT_EQ(pairs[i].rouge1.f1, 1.0);
  }
}

TEST(Align, LeftoverGoldBecomesAnUnmatchedPair) {
  const std::vector<AtomicSentence> pred{atom("she taught herself how to draw")};
  const std::vector<std::string> gold{"she taught herself to draw",
                                      "she began selling cartoons while still in high school"};
  const auto pairs = align_atoms(pred, gold);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].gold, gold[0]);
  EXPECT_FALSE(pairs[1].predicted.has_value());
  EXPECT_EQ(pairs[1].gold, gold[1]);
  EXPECT_EQ(pairs[1].rouge1, Score::zero());
  EXPECT_EQ(pairs[1].rougeL, Score::zero());
}

TEST(Align, TiesGoToTheLowerIndices) {
  const std::vector<AtomicSentence> pred{atom("france signed the treaty"), atom("britain signed the treaty")};
  const std::vector<std::string> gold{"france and britain signed the treaty"};
  const auto pairs = align_atoms(pred, gold);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].predicted_index, 0u);
  EXPECT_EQ(pairs[0].gold_index, 0u);
  EXPECT_FALSE(pairs[1].gold.has_value());
}

TEST(Align, PairCountIdentity) {
  std::mt19937 rng(5);
  const Words vocab = words({"anna", "ate", "sang", "an", "apple", "the", "storm"});
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_int_distribution<int> len(1, 5);
  std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
  auto sentence = [&] {
    std::string s;
    for (int i = len(rng); i > 0; --i) s += (s.empty() ? "" : " ") + vocab[pick(rng)];
    return s;
  };
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AtomicSentence> pred(count(rng));
    std::vector<std::string> gold(count(rng));
    if (pred.empty() && gold.empty()) {
      EXPECT_THROW(align_atoms(pred, gold), Error);
      continue;
    }
    for (auto& p : pred) p = atom(sentence());
    for (auto& g : gold) g = sentence();
    const auto pairs = align_atoms(pred, gold);
    const auto matches = static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const AlignedPair& p) { return p.matched(); }));
    EXPECT_EQ(matches, std::min(pred.size(), gold.size()));
    EXPECT_EQ(pairs.size(), pred.size() + gold.size() - matches);
    std::set<std::size_t> ps;
    std::set<std::size_t> gs;
    for (const auto& p : pairs) {
      EXPECT_TRUE(p.predicted || p.gold);
      if (p.predicted_index) EXPECT_TRUE(ps.insert(*p.predicted_index).second);
      if (p.gold_index) EXPECT_TRUE(gs.insert(*p.gold_index).second);
      for (const Score& s : {p.rouge1, p.rouge2, p.rougeL}) {
        EXPECT_GE(s.precision, 0.0);
        EXPECT_LE(s.precision, 1.0);
        EXPECT_GE(s.recall, 0.0);
        EXPECT_LE(s.recall, 1.0);
        EXPECT_GE(s.f1, 0.0);
        EXPECT_LE(s.f1, 1.0);
      }
    }
    EXPECT_EQ(ps.size(), pred.size());
    EXPECT_EQ(gs.size(), gold.size());
  }
}

TEST(Align, SemanticIsFilledWhenEmbeddingsAreGiven) {
  const std::vector<AtomicSentence> pred{atom("a b")};
  const std::vector<std::string> gold{"a", "c"};
  const std::vector<TokenEmbeddings> pe{embed({{1, 0}, {0, 1}})};
  const std::vector<TokenEmbeddings> ge{embed({{1, 0}}), embed({{0, 1}})};
  const auto pairs = align_atoms(pred, gold, pe, ge);
  ASSERT_EQ(pairs.size(), 2u);
  ASSERT_TRUE(pairs[0].semantic.has_value());
  expect_score(*pairs[0].semantic, 0.5, 1.0, 0.6667);
  EXPECT_EQ(pairs[1].semantic, Score::zero());
}

TEST(Corpus, MacroAverages) {
  AlignedPair good;
  good.predicted = atom("a");
  good.gold = "a";
  good.rouge1 = good.rouge2 = good.rougeL = Score::perfect();
  AlignedPair lonely;
  lonely.gold = "b";
  const std::vector<AlignedPair> one{good};
  const auto s1 = corpus_scores(one);
  EXPECT_EQ(s1.all_pairs.rouge1, Score::perfect());
  EXPECT_EQ(s1.all_pairs.pairs, 1u);
  const std::vector<AlignedPair> two{good, lonely};
  const auto s2 = corpus_scores(two);
  expect_score(s2.all_pairs.rouge1, 0.5, 0.5, 0.5, 1e-12);
  ASSERT_TRUE(s2.matched_pairs.has_value());
  EXPECT_EQ(s2.matched_pairs->pairs, 1u);
  EXPECT_EQ(s2.matched_pairs->rouge1, Score::perfect());
  EXPECT_FALSE(s2.all_pairs.semantic.has_value());
}

TEST(Corpus, AveragesComponentsIndependently) {
  AlignedPair a;
  a.predicted = atom("x");
  a.gold = "x";
  a.rouge1 = Score::from(1.0, 0.5);
  AlignedPair b = a;
  b.rouge1 = Score::from(0.5, 0.5);
  const std::vector<AlignedPair> pairs{a, b};
  const auto s = corpus_scores(pairs);
  EXPECT_NEAR(s.all_pairs.rouge1.precision, 0.75, 1e-12);
  EXPECT_NEAR(s.all_pairs.rouge1.recall, 0.5, 1e-12);
  // Mean of per-pair F1 values, not F1 of the mean P and R.
  EXPECT_NEAR(s.all_pairs.rouge1.f1, (2.0 / 3.0 + 0.5) / 2.0, 1e-12);
}

TEST(Stats, LengthAndVerbs) {
  const std::vector<TaggedAtom> atoms{{{"anna", "ate", "an", "apple"}, {"PROPN", "VERB", "DET", "NOUN"}},
                                      {{"anna", "ate", "a", "banana"}, {"PROPN", "VERB", "DET", "NOUN"}}};
  const auto s = length_verb_stats(atoms);
  EXPECT_DOUBLE_EQ(s.avg_tokens_per_atom, 4.0);
  EXPECT_DOUBLE_EQ(s.avg_verbs_per_atom, 1.0);
  EXPECT_EQ(s.atom_count, 2u);
  const std::vector<TaggedAtom> aux{{{"it", "was", "built"}, {"PRON", "AUX", "VERB"}}};
  EXPECT_DOUBLE_EQ(length_verb_stats(aux).avg_verbs_per_atom, 1.0);
  EXPECT_THROW(length_verb_stats({}), Error);
  const std::vector<TaggedAtom> skew{{{"a", "b"}, {"X"}}};
  EXPECT_THROW(length_verb_stats(skew), Error);
}
