#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mica/corpus.hpp"

using namespace mica;

namespace {

const Label O = Label::outside();
const Label BPER = Label::begin(EntityType::PER);
const Label IPER = Label::inside(EntityType::PER);
const Label BLOC = Label::begin(EntityType::LOC);
const Label ILOC = Label::inside(EntityType::LOC);

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Sentence sentence_of(std::vector<Label> labels) {
  Sentence s;
  for (std::size_t i = 0; i < labels.size(); ++i) s.tokens.push_back({"t" + std::to_string(i), labels[i], {}});
  return s;
}

}  // namespace

TEST(Label, ParsesAndPrintsAllNine) {
  for (Label l : kAllLabels) {
    auto back = Label::parse(l.str());
    ASSERT_TRUE(back.has_value()) << l.str();
    EXPECT_EQ(*back, l);
  }
  EXPECT_FALSE(Label::parse("B-ORG"));
  EXPECT_FALSE(Label::parse("b-per"));
  EXPECT_FALSE(Label::parse(""));
  EXPECT_EQ(kAllLabels.front(), O);
}

TEST(ParseConll, TwoTokenSpan) {
  auto parsed = parse_conll("Jean\tB-PER\nDupont\tI-PER\n");
  ASSERT_EQ(parsed.corpus.sentence_count(), 1u);
  const auto spans = spans_from_bio(parsed.corpus.documents[0].sentences[0], Layer::gold);
  ASSERT_EQ(spans.size(), 1u);
  EXPECT_EQ(spans[0].type, EntityType::PER);
  EXPECT_EQ(spans[0].start, 0u);
  EXPECT_EQ(spans[0].end, 2u);
  EXPECT_EQ(spans[0].surface, "Jean Dupont");
  EXPECT_EQ(parsed.repairs, 0u);
}

TEST(ParseConll, RepairsOrphanInside) {
  auto parsed = parse_conll("Jean\tI-PER\n");
  EXPECT_EQ(parsed.repairs, 1u);
  EXPECT_EQ(parsed.corpus.documents[0].sentences[0].tokens[0].gold, BPER);

  parsed = parse_conll("à\tO\nParis\tI-LOC\nJean\tI-PER\n");
  EXPECT_EQ(parsed.repairs, 2u);
  EXPECT_EQ(parsed.corpus.documents[0].sentences[0].labels(Layer::gold), (std::vector<Label>{O, BLOC, BPER}));
}

TEST(ParseConll, UnknownTagNamesLine) {
  try {
    parse_conll("Acme\tB-ORG\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("B-ORG"), std::string::npos);
  }
  try {
    parse_conll("a\tO\n\nb\tO\nc\tX\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
  }
}

TEST(ParseConll, MalformedLines) {
  EXPECT_THROW(parse_conll("no-tab-here\n"), ParseError);
  EXPECT_THROW(parse_conll("a\tO\textra\n"), ParseError);
  EXPECT_THROW(parse_conll("\tO\n"), ParseError);
  EXPECT_THROW(parse_conll("two words\tO\n"), ParseError);
}

TEST(ParseConll, EmptyInputs) {
  EXPECT_EQ(parse_conll("").corpus.documents.size(), 0u);
  EXPECT_EQ(parse_conll("\n\n  \n").corpus.documents.size(), 0u);
  EXPECT_EQ(parse_conll("-DOCSTART-\tO\n\n").corpus.documents.size(), 0u);
}

TEST(ParseConll, DocumentsAndCrlf) {
  auto parsed = parse_conll("a\tO\r\n\r\n-DOCSTART-\tO\r\n\r\nb\tB-LOC\r\nc\tI-LOC\r\n\r\nd\tO\r\n");
  const auto& c = parsed.corpus;
  ASSERT_EQ(c.documents.size(), 2u);
  EXPECT_FALSE(c.documents[0].docstart);
  EXPECT_TRUE(c.documents[1].docstart);
  EXPECT_EQ(c.documents[1].sentences.size(), 2u);
  EXPECT_EQ(c.documents[1].sentences[1].index, 1u);
  EXPECT_EQ(c.documents[1].sentences[0].labels(Layer::gold), (std::vector<Label>{BLOC, ILOC}));
  EXPECT_EQ(c.token_count(), 4u);
}

TEST(SpansFromBio, Examples) {
  EXPECT_EQ(spans_from_bio(sentence_of({BPER, IPER, O}), Layer::gold).size(), 1u);
  EXPECT_TRUE(spans_from_bio(sentence_of({O, O, O}), Layer::gold).empty());
  const auto two = spans_from_bio(sentence_of({BPER, BPER}), Layer::gold);
  ASSERT_EQ(two.size(), 2u);
  EXPECT_EQ(two[0].end, 1u);
  EXPECT_EQ(two[1].start, 1u);
  EXPECT_EQ(two[1].end, 2u);
}

TEST(SpansFromBio, MissingLayerThrows) {
  EXPECT_THROW(spans_from_bio(sentence_of({O}), Layer::predicted), Error);
}

TEST(BioFromSpans, Examples) {
  const std::vector<EntitySpan> per{{EntityType::PER, 0, 2, {}}};
  EXPECT_EQ(bio_from_spans(3, per), (std::vector<Label>{BPER, IPER, O}));
  EXPECT_EQ(bio_from_spans(2, {}), (std::vector<Label>{O, O}));
  const std::vector<EntitySpan> overlap{{EntityType::PER, 0, 1, {}}, {EntityType::LOC, 0, 1, {}}};
  EXPECT_THROW(bio_from_spans(2, overlap), Error);
  const std::vector<EntitySpan> outside{{EntityType::PER, 1, 3, {}}};
  EXPECT_THROW(bio_from_spans(2, outside), Error);
}

TEST(BioProperties, SpansRoundTripAfterRepair) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 3000; ++k) {
    std::vector<Label> labels(rng() % 9);
    for (auto& l : labels) l = kAllLabels[rng() % kNumLabels];
    std::vector<Label> repaired = labels;
    repair_bio(repaired);
    ASSERT_TRUE(is_valid_bio(repaired));
    EXPECT_EQ(repair_bio(std::span<Label>(repaired)), 0u);
    const auto spans = spans_from_labels(labels);
    EXPECT_EQ(bio_from_spans(labels.size(), spans), repaired);
    EXPECT_EQ(spans_from_labels(repaired), spans);
  }
}

TEST(WriteConll, Examples) {
  EXPECT_EQ(write_conll(Corpus{}, Layer::gold), "");
  const std::string one = "Jean\tB-PER\nDupont\tI-PER\n\n";
  EXPECT_EQ(write_conll(parse_conll(one).corpus, Layer::gold), one);
  const std::string with_header = "-DOCSTART-\tO\n\n" + one;
  EXPECT_EQ(write_conll(parse_conll(with_header).corpus, Layer::gold), with_header);
}

TEST(WriteConll, MissingLayerThrows) {
  auto c = parse_conll("a\tO\n").corpus;
  EXPECT_THROW(write_conll(c, Layer::predicted), Error);
  EXPECT_THROW(write_conll(strip_layer(c, Layer::gold), Layer::gold), Error);
}

TEST(WriteConll, RepairedInputNormalizes) {
  const auto parsed = parse_conll("Jean\tI-PER\nDupont\tI-PER\n");
  EXPECT_EQ(write_conll(parsed.corpus, Layer::gold), "Jean\tB-PER\nDupont\tI-PER\n\n");
}

TEST(WriteConll, FixturesRoundTrip) {
  std::size_t seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(MICA_FIXTURE_DIR)) {
    if (entry.path().extension() != ".conll") continue;
    ++seen;
    const std::string text = read(entry.path());
    const auto parsed = parse_conll(text);
    EXPECT_EQ(parsed.repairs, 0u) << entry.path();
    EXPECT_EQ(write_conll(parsed.corpus, Layer::gold), text) << entry.path();
  }
  EXPECT_GE(seen, 3u);
}

TEST(WriteConll, SpanExtractionIgnoresDocumentPosition) {
  const auto c = parse_conll(read(std::filesystem::path(MICA_FIXTURE_DIR) / "multidoc.conll")).corpus;
  for (const auto& doc : c.documents) {
    for (const auto& s : doc.sentences) {
      Corpus alone;
      alone.documents.push_back(Document{"x", {s}, true});
      EXPECT_EQ(spans_from_bio(alone.documents[0].sentences[0], Layer::gold), spans_from_bio(s, Layer::gold));
    }
  }
}
