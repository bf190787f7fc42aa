#include <gtest/gtest.h>

#include <random>

#include "mica/features.hpp"

using namespace mica;

namespace {

FeatureVector at(std::vector<std::string> words, std::size_t i) { return extract_features(words, i); }

}  // namespace

TEST(Features, SingleToken) {
  const auto fv = at({"Jean"}, 0);
  for (const char* key : {"bias", "w.lower=jean", "w.istitle", "BOS", "EOS", "suffix3=ean", "suffix2=an"})
    EXPECT_TRUE(fv.contains(key)) << key;
  EXPECT_FALSE(fv.contains("w.isupper"));
  for (const auto& [key, value] : fv) {
    EXPECT_NE(key.rfind("-1:", 0), 0u) << key;
    EXPECT_NE(key.rfind("+1:", 0), 0u) << key;
  }
  EXPECT_EQ(fv.size(), 7u);
}

TEST(Features, CaseAndDigitFlags) {
  const auto paris = at({"PARIS"}, 0);
  EXPECT_TRUE(paris.contains("w.isupper"));
  EXPECT_FALSE(paris.contains("w.istitle"));

  const auto year = at({"1990"}, 0);
  EXPECT_TRUE(year.contains("w.isdigit"));
  EXPECT_TRUE(year.contains("suffix3=990"));
  EXPECT_FALSE(year.contains("w.isupper"));

  EXPECT_TRUE(at({"Ms.LAVERGNE"}, 0).contains("w.lower=ms.lavergne"));
  EXPECT_FALSE(at({"Ms.LAVERGNE"}, 0).contains("w.istitle"));
  EXPECT_FALSE(at({"12a"}, 0).contains("w.isdigit"));
  EXPECT_TRUE(at({"A"}, 0).contains("w.isupper"));
  EXPECT_TRUE(at({"A"}, 0).contains("w.istitle"));
  EXPECT_FALSE(at({"."}, 0).contains("w.isupper"));
}

TEST(Features, FrenchDiacritics) {
  const auto jeremy = at({"Jérémy"}, 0);
  EXPECT_TRUE(jeremy.contains("w.istitle"));
  EXPECT_TRUE(jeremy.contains("w.lower=jérémy"));
  EXPECT_TRUE(jeremy.contains("suffix3=émy"));
  EXPECT_TRUE(jeremy.contains("suffix2=my"));

  const auto etienne = at({"ÉTIENNE"}, 0);
  EXPECT_TRUE(etienne.contains("w.isupper"));
  EXPECT_TRUE(etienne.contains("w.lower=étienne"));

  EXPECT_TRUE(at({"Élodie"}, 0).contains("w.istitle"));
  EXPECT_FALSE(at({"élodie"}, 0).contains("w.istitle"));
}

TEST(Features, ShortTokensUseWholeSuffix) {
  const auto fv = at({"à"}, 0);
  EXPECT_TRUE(fv.contains("suffix3=à"));
  EXPECT_TRUE(fv.contains("suffix2=à"));
}

TEST(Features, Neighbours) {
  const auto fv = at({"Monsieur", "Jean", "DUPONT"}, 1);
  for (const char* key : {"-1:bias", "-1:w.lower=monsieur", "-1:w.istitle", "+1:bias", "+1:w.lower=dupont",
                          "+1:w.isupper"})
    EXPECT_TRUE(fv.contains(key)) << key;
  EXPECT_FALSE(fv.contains("BOS"));
  EXPECT_FALSE(fv.contains("EOS"));
  EXPECT_FALSE(fv.contains("-1:suffix3=eur"));
  EXPECT_FALSE(fv.contains("+1:w.istitle"));
}

TEST(Features, OutOfRangeThrows) {
  EXPECT_THROW(at({"a"}, 1), Error);
  EXPECT_THROW(at({}, 0), Error);
}

TEST(Features, DuplicateKeyRejected) {
  FeatureVector fv;
  fv.add("bias", 1.0);
  EXPECT_THROW(fv.add("bias", 2.0), Error);
  EXPECT_EQ(fv.value("bias"), 1.0);
  EXPECT_FALSE(fv.value("missing").has_value());
}

TEST(FeatureProperties, LocalityDeterminismUnitValues) {
  const std::vector<std::string> pool = {"Jean", "DUPONT", "1990", "à", "Paris", "le", "Jérémy", "MS.", "x", "É"};
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    std::vector<std::string> words(1 + rng() % 7);
    for (auto& w : words) w = pool[rng() % pool.size()];
    const std::size_t i = rng() % words.size();
    const auto fv = extract_features(words, i);
    EXPECT_EQ(fv, extract_features(words, i));
    for (const auto& [key, value] : fv) EXPECT_EQ(value, 1.0) << key;

    auto mutated = words;
    for (std::size_t j = 0; j < mutated.size(); ++j)
      if (j + 1 < i || j > i + 1) mutated[j] = pool[rng() % pool.size()] + "zz";
    EXPECT_EQ(extract_features(mutated, i), fv);
  }
}
