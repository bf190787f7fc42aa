#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "mica/mica.hpp"
#include "mica/synthetic.hpp"
#include "support/oracles.hpp"

using namespace mica;

namespace {

const Label O = Label::outside();
const Label BPER = Label::begin(EntityType::PER);
const Label IPER = Label::inside(EntityType::PER);
const Label BLOC = Label::begin(EntityType::LOC);

Sentence make_sentence(std::vector<std::pair<std::string, Label>> tokens) {
  Sentence s;
  for (auto& [w, l] : tokens) s.tokens.push_back({w, l, {}});
  return s;
}

Document make_document(std::vector<Sentence> sentences) {
  Document d{"d", std::move(sentences), true};
  for (std::size_t i = 0; i < d.sentences.size(); ++i) d.sentences[i].index = i;
  return d;
}

DocumentLabels gold_of(const Document& d) {
  DocumentLabels out;
  for (const auto& s : d.sentences) out.push_back(s.labels(Layer::gold));
  return out;
}

std::vector<std::string> sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Five sentences, one PER or LOC mention each.
Document five_sentences() {
  return make_document({
      make_sentence({{"Jean", BPER}, {"Dupont", IPER}, {"présent", O}}),
      make_sentence({{"à", O}, {"Paris", BLOC}}),
      make_sentence({{"Marie", BPER}, {"parle", O}}),
      make_sentence({{"rien", O}}),
      make_sentence({{"LAVERGNE", BPER}, {"signe", O}}),
  });
}

}  // namespace

TEST(Dictionary, CurrentSentenceOnly) {
  const auto doc = make_document({make_sentence({{"Jean", BPER}, {"Dupont", IPER}, {"présent", O}})});
  const auto preds = gold_of(doc);
  const auto dict = build_dictionary(doc, 0, preds, ContextConfig{});
  EXPECT_EQ(dict.candidates(EntityType::PER), sorted({"jean dupont", "jean", "dupont"}));
  EXPECT_EQ(dict.size(EntityType::PRO), 0u);
  EXPECT_EQ(dict.size(EntityType::LOC), 0u);
  EXPECT_EQ(dict.size(EntityType::DATE), 0u);
}

TEST(Dictionary, WindowClipsAtDocumentStart) {
  const auto doc = five_sentences();
  const auto preds = gold_of(doc);
  const auto dict = build_dictionary(doc, 0, preds, ContextConfig{1, true});
  EXPECT_EQ(dict.candidates(EntityType::PER), sorted({"jean dupont", "jean", "dupont"}));
  EXPECT_EQ(dict.candidates(EntityType::LOC), std::vector<std::string>{"paris"});

  const auto last = build_dictionary(doc, 4, preds, ContextConfig{1, true});
  EXPECT_EQ(last.candidates(EntityType::PER), std::vector<std::string>{"lavergne"});
  EXPECT_EQ(last.size(EntityType::LOC), 0u);

  const auto huge = build_dictionary(doc, 2, preds, ContextConfig{1000, true});
  EXPECT_EQ(huge.size(EntityType::PER), 5u);
}

TEST(Dictionary, ExcludeCurrent) {
  const auto doc = five_sentences();
  const auto dict = build_dictionary(doc, 2, gold_of(doc), ContextConfig{0, false});
  EXPECT_TRUE(dict.empty());
}

TEST(Dictionary, NoEntitiesAndErrors) {
  const auto doc = make_document({make_sentence({{"rien", O}}), make_sentence({{"du", O}, {"tout", O}})});
  const auto preds = gold_of(doc);
  EXPECT_TRUE(build_dictionary(doc, 1, preds, ContextConfig{3, true}).empty());
  EXPECT_THROW(build_dictionary(doc, 2, preds, ContextConfig{}), Error);
  const DocumentLabels short_preds = {preds[0]};
  EXPECT_THROW(build_dictionary(doc, 1, short_preds, ContextConfig{}), Error);
}

TEST(Dictionary, FoldsAndDeduplicates) {
  EntityDictionary d;
  d.add(EntityType::PER, "DUPONT");
  d.add(EntityType::PER, "Dupont");
  d.add(EntityType::PER, "");
  d.add(EntityType::PER, "Élodie");
  EXPECT_EQ(d.candidates(EntityType::PER), sorted({"dupont", "élodie"}));
}

TEST(Dictionary, WindowMonotone) {
  const auto corpus = synthetic::generate({20, 6, 12, 4});
  for (const auto& doc : corpus.documents) {
    const auto preds = gold_of(doc);
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      for (std::size_t k = 0; k < 4; ++k) {
        const auto small = build_dictionary(doc, s, preds, ContextConfig{k, true});
        const auto big = build_dictionary(doc, s, preds, ContextConfig{k + 1, true});
        for (EntityType t : kEntityTypes) {
          const auto a = small.candidates(t), b = big.candidates(t);
          EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        }
      }
    }
  }
}

TEST(Similarity, Examples) {
  EntityDictionary d;
  d.add(EntityType::PER, "dupont");
  EXPECT_DOUBLE_EQ(similarity_vector("Dupont", d)[EntityType::PER], 2.0);
  EXPECT_EQ(similarity_vector("Dupont", d)[EntityType::LOC], 0.0);

  EntityDictionary l;
  l.add(EntityType::PER, "lavergne");
  const double s = similarity_vector("MS.LAVERGNE", l)[EntityType::PER];
  EXPECT_DOUBLE_EQ(s, (1.0 - 3.0 / 11.0) + 8.0 / 11.0);
  EXPECT_NEAR(s, 1.4545, 1e-4);

  EXPECT_EQ(similarity_vector("anything", EntityDictionary{}), SimilarityVector{});
}

TEST(Similarity, TieBreakPrefersShorterThenSmaller) {
  // Both candidates are one edit from "aaab" (Lev term 0.75). The shorter
  // one wins even though "aa0b" sorts first; its LCS term is 3/4, not 2/4.
  EntityDictionary d;
  d.add(EntityType::LOC, "aa0b");
  d.add(EntityType::LOC, "aaa");
  EXPECT_DOUBLE_EQ(similarity_vector("aaab", d)[EntityType::LOC], 0.75 + 0.75);

  // Same length and same Lev term 0.5: "aaxx" sorts before "xaxb" and
  // shares "aa" (LCS 2/4) where "xaxb" would give 1/4.
  EntityDictionary e;
  e.add(EntityType::LOC, "xaxb");
  e.add(EntityType::LOC, "aaxx");
  EXPECT_DOUBLE_EQ(similarity_vector("aaab", e)[EntityType::LOC], 0.5 + 0.5);
}

TEST(Similarity, OrderOfInsertionIrrelevant) {
  std::mt19937_64 rng(20);
  for (int k = 0; k < 300; ++k) {
    std::vector<std::string> cands;
    for (int c = 0; c < 5; ++c) cands.push_back(unicode::encode(oracle::random_string(rng, 6, 3)));
    const std::string word = unicode::encode(oracle::random_string(rng, 6, 3));
    EntityDictionary a, b;
    for (const auto& c : cands) a.add(EntityType::DATE, c);
    std::shuffle(cands.begin(), cands.end(), rng);
    for (const auto& c : cands) b.add(EntityType::DATE, c);
    EXPECT_EQ(similarity_vector(word, a), similarity_vector(word, b));
  }
}

TEST(Similarity, MaxLevTermMonotoneInCandidates) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 300; ++k) {
    const auto word = oracle::random_string(rng, 6, 3);
    EntityDictionary d;
    double best = -1.0;
    for (int c = 0; c < 6; ++c) {
      const auto cand = oracle::random_string(rng, 6, 3);
      if (cand.empty()) continue;
      d.add(EntityType::PRO, unicode::encode(cand));
      double m = -1.0;
      for (const auto& e : d.entries(EntityType::PRO)) m = std::max(m, strsim::lev_similarity(word, e.folded));
      EXPECT_GE(m, best);
      best = m;
    }
  }
}

TEST(Enrich, AppendsFourKeys) {
  const auto fv = enrich(FeatureVector{}, SimilarityVector{});
  EXPECT_EQ(fv.size(), 4u);
  for (EntityType t : kEntityTypes) EXPECT_EQ(fv.value(similarity_key(t)), 0.0);

  SimilarityVector s;
  s[EntityType::PER] = 1.4545;
  const auto once = enrich(FeatureVector{}, s);
  EXPECT_EQ(once.value("sim:PER"), 1.4545);
  EXPECT_THROW(enrich(once, s), Error);
}

TEST(TwoPass, PerfectPassOneGivesSelfMatch) {
  const auto doc = five_sentences();
  const auto preds = gold_of(doc);
  const auto fv = enriched_features(doc, 0, preds, ContextConfig{});
  EXPECT_EQ(fv[0].value("sim:PER"), 2.0);
  EXPECT_EQ(fv[1].value("sim:PER"), 2.0);
  EXPECT_LT(*fv[2].value("sim:PER"), 2.0);
  EXPECT_EQ(fv[0].value("sim:LOC"), 0.0);
}

TEST(TwoPass, FalsePositivePropagates) {
  const auto doc = make_document({
      make_sentence({{"Madame", O}, {"Jean", BPER}}),
      make_sentence({{"Madame", O}, {"parle", O}}),
  });
  DocumentLabels preds = gold_of(doc);
  preds[0][0] = BPER;  // pass 1 wrongly tags "Madame"
  const auto dict = build_dictionary(doc, 1, preds, ContextConfig{1, true});
  const auto c = dict.candidates(EntityType::PER);
  EXPECT_NE(std::find(c.begin(), c.end(), "madame"), c.end());
  EXPECT_EQ(similarity_vector("Madame", dict)[EntityType::PER], 2.0);
}

TEST(TwoPass, MissingSpaceScenario) {
  const auto doc = make_document({
      make_sentence({{"Mme", O}, {"LAVERGNE", BPER}, {"conteste", O}}),
      make_sentence({{"MS.LAVERGNE", O}, {"ne", O}, {"justifie", O}}),
  });
  const auto fv = enriched_features(doc, 1, gold_of(doc), ContextConfig{1, true});
  EXPECT_NEAR(*fv[0].value("sim:PER"), 1.4545, 1e-4);
}

TEST(TwoPass, InertSimilarityWeightsReproducePassOne) {
  const auto corpus = synthetic::generate({15, 6, 10, 2});
  TrainConfig cfg;
  cfg.epochs = 5;
  const auto pass1 = train(handcrafted_training_data(corpus), cfg);
  std::vector<std::string> vocab = pass1.vocabulary();
  for (EntityType t : kEntityTypes) vocab.push_back(similarity_key(t));
  CrfModel pass2(pass1.labels(), vocab);
  for (std::size_t p = 0; p < pass1.num_labels(); ++p)
    for (std::size_t q = 0; q < pass1.num_labels(); ++q) pass2.transition(p, q) = pass1.transition(p, q);
  for (std::size_t f = 0; f < pass1.num_features(); ++f)
    for (std::size_t y = 0; y < pass1.num_labels(); ++y)
      pass2.emission(*pass2.feature_id(pass1.vocabulary()[f]), y) = pass1.emission(f, y);
  for (const auto& doc : corpus.documents)
    EXPECT_EQ(two_pass_predict(doc, pass1, pass2, ContextConfig{2, true}), decode_document(doc, pass1));
}

TEST(TwoPass, EmptyDocument) {
  const CrfModel m;
  EXPECT_TRUE(two_pass_predict(Document{}, m, m, ContextConfig{}).empty());
}

TEST(TwoPass, DeterministicAndGoldBlind) {
  const auto corpus = synthetic::generate({12, 6, 10, 3});
  TrainConfig cfg;
  cfg.epochs = 4;
  const auto a = two_pass_train(corpus, ContextConfig{1, true}, cfg);
  const auto b = two_pass_train(corpus, ContextConfig{1, true}, cfg);
  EXPECT_EQ(a.pass1, b.pass1);
  EXPECT_EQ(a.pass2, b.pass2);
  EXPECT_TRUE(has_similarity_features(a.pass2));
  EXPECT_FALSE(has_similarity_features(a.pass1));

  const Corpus blind = strip_layer(corpus, Layer::gold);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d)
    EXPECT_EQ(two_pass_predict(blind.documents[d], a.pass1, a.pass2, ContextConfig{1, true}),
              two_pass_predict(corpus.documents[d], a.pass1, a.pass2, ContextConfig{1, true}));
}

TEST(SimilarityProperties, BoundsAndExactMatch) {
  std::mt19937_64 rng(22);
  for (int k = 0; k < 1000; ++k) {
    EntityDictionary d;
    std::vector<std::u32string> folded;
    for (int c = 0, n = static_cast<int>(rng() % 4); c < n; ++c) {
      auto s = oracle::random_string(rng, 5, 3);
      if (rng() % 2) s = unicode::fold(s);
      d.add(EntityType::PER, unicode::encode(s));
    }
    for (const auto& e : d.entries(EntityType::PER)) folded.push_back(e.folded);
    const auto word = oracle::random_string(rng, 5, 3);
    const double s = similarity_vector(unicode::encode(word), d)[EntityType::PER];
    EXPECT_GE(s, 0.0);
    EXPECT_LE(s, 2.0);
    const bool exact = std::find(folded.begin(), folded.end(), unicode::fold(word)) != folded.end();
    EXPECT_EQ(s == 2.0, exact);
    EXPECT_DOUBLE_EQ(s, oracle::potential(unicode::fold(word), folded));
  }
}
