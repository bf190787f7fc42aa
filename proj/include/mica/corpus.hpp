#ifndef MICA_CORPUS_HPP
#define MICA_CORPUS_HPP

// Annotated text hierarchy (token / sentence / document / corpus), the
// closed BIO label set, span conversion and CoNLL reading/writing.
//
// CoNLL layout: one `surface<TAB>tag` per line, a blank line ends a
// sentence, and `-DOCSTART-<TAB>O` ends the current document and opens a
// new one. A file without any -DOCSTART- line is a single document.

#include <array>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mica/error.hpp"
#include "mica/unicode.hpp"

namespace mica {

enum class EntityType : std::uint8_t { PER = 0, PRO = 1, LOC = 2, DATE = 3 };

inline constexpr std::size_t kNumEntityTypes = 4;
inline constexpr std::array<EntityType, kNumEntityTypes> kEntityTypes = {
    EntityType::PER, EntityType::PRO, EntityType::LOC, EntityType::DATE};

constexpr std::string_view to_string(EntityType t) {
  switch (t) {
    case EntityType::PER: return "PER";
    case EntityType::PRO: return "PRO";
    case EntityType::LOC: return "LOC";
    case EntityType::DATE: return "DATE";
  }
  return "?";
}

constexpr std::optional<EntityType> parse_entity_type(std::string_view s) {
  for (EntityType t : kEntityTypes)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

/// One of the nine BIO tags. Codes: 0 = O, 1 + 2t = B-t, 2 + 2t = I-t.
class Label {
 public:
  constexpr Label() = default;

  static constexpr Label outside() { return Label(0); }
  static constexpr Label begin(EntityType t) { return Label(1 + 2 * static_cast<std::uint8_t>(t)); }
  static constexpr Label inside(EntityType t) { return Label(2 + 2 * static_cast<std::uint8_t>(t)); }
  static constexpr Label from_code(std::size_t code) { return Label(static_cast<std::uint8_t>(code)); }

  constexpr std::size_t code() const { return code_; }
  constexpr bool is_outside() const { return code_ == 0; }
  constexpr bool is_begin() const { return code_ != 0 && code_ % 2 == 1; }
  constexpr bool is_inside() const { return code_ != 0 && code_ % 2 == 0; }

  /// Entity type of a B-/I- label; undefined for O.
  constexpr EntityType type() const { return static_cast<EntityType>((code_ - 1) / 2); }

  std::string str() const {
    if (is_outside()) return "O";
    return std::string(is_begin() ? "B-" : "I-") + std::string(to_string(type()));
  }

  static std::optional<Label> parse(std::string_view s) {
    if (s == "O") return outside();
    if (s.size() < 3 || s[1] != '-') return std::nullopt;
    auto t = parse_entity_type(s.substr(2));
    if (!t) return std::nullopt;
    if (s[0] == 'B') return begin(*t);
    if (s[0] == 'I') return inside(*t);
    return std::nullopt;
  }

  friend constexpr bool operator==(Label, Label) = default;

 private:
  constexpr explicit Label(std::uint8_t code) : code_(code) {}
  std::uint8_t code_ = 0;
};

inline constexpr std::size_t kNumLabels = 9;

inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::outside(),
    Label::begin(EntityType::PER),  Label::inside(EntityType::PER),
    Label::begin(EntityType::PRO),  Label::inside(EntityType::PRO),
    Label::begin(EntityType::LOC),  Label::inside(EntityType::LOC),
    Label::begin(EntityType::DATE), Label::inside(EntityType::DATE)};

enum class Layer { gold, predicted };

struct Token {
  std::string surface;
  std::optional<Label> gold;
  std::optional<Label> predicted;

  const std::optional<Label>& label(Layer layer) const {
    return layer == Layer::gold ? gold : predicted;
  }
  std::optional<Label>& label(Layer layer) { return layer == Layer::gold ? gold : predicted; }
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t index = 0;

  std::size_t size() const { return tokens.size(); }

  /// Labels of one layer; throws if any token lacks it.
  std::vector<Label> labels(Layer layer) const {
    std::vector<Label> out;
    out.reserve(tokens.size());
    for (const auto& tok : tokens) {
      const auto& l = tok.label(layer);
      if (!l) throw Error("sentence " + std::to_string(index) + " has no " +
                          (layer == Layer::gold ? "gold" : "predicted") + " labels");
      out.push_back(*l);
    }
    return out;
  }

  void set_labels(Layer layer, std::span<const Label> labels) {
    if (labels.size() != tokens.size()) throw Error("label count does not match sentence length");
    for (std::size_t i = 0; i < labels.size(); ++i) tokens[i].label(layer) = labels[i];
  }
};

struct Document {
  std::string id;
  std::vector<Sentence> sentences;
  // Whether the document is introduced by a -DOCSTART- line when written.
  bool docstart = true;
};

struct Corpus {
  std::vector<Document> documents;

  std::size_t sentence_count() const {
    std::size_t n = 0;
    for (const auto& d : documents) n += d.sentences.size();
    return n;
  }
  std::size_t token_count() const {
    std::size_t n = 0;
    for (const auto& d : documents)
      for (const auto& s : d.sentences) n += s.size();
    return n;
  }
};

struct EntitySpan {
  EntityType type = EntityType::PER;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string surface;

  friend bool operator==(const EntitySpan&, const EntitySpan&) = default;
};

// ---------------------------------------------------------------------------
// BIO helpers

/// True when no I-T follows O, sentence start, or a label of another type.
inline bool is_valid_bio(std::span<const Label> labels) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i].is_inside()) continue;
    if (i == 0 || labels[i - 1].is_outside() || labels[i - 1].type() != labels[i].type())
      return false;
  }
  return true;
}

/// Rewrites every orphan I-T to B-T. Returns the number of rewrites.
inline std::size_t repair_bio(std::span<Label> labels) {
  std::size_t repairs = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i].is_inside()) continue;
    if (i == 0 || labels[i - 1].is_outside() || labels[i - 1].type() != labels[i].type()) {
      labels[i] = Label::begin(labels[i].type());
      ++repairs;
    }
  }
  return repairs;
}

/// Maximal B-T (I-T)* runs. An orphan I-T opens a span, as if repaired.
/// `surfaces` may be empty, in which case span surfaces are left empty.
inline std::vector<EntitySpan> spans_from_labels(std::span<const Label> labels,
                                                 std::span<const std::string> surfaces = {}) {
  std::vector<EntitySpan> spans;
  std::size_t i = 0;
  while (i < labels.size()) {
    if (labels[i].is_outside()) {
      ++i;
      continue;
    }
    const EntityType t = labels[i].type();
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] == Label::inside(t)) ++j;
    EntitySpan span{t, i, j, {}};
    if (!surfaces.empty()) {
      for (std::size_t k = i; k < j; ++k) {
        if (k > i) span.surface.push_back(' ');
        span.surface += surfaces[k];
      }
    }
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

inline std::vector<EntitySpan> spans_from_bio(const Sentence& sentence, Layer layer) {
  const auto labels = sentence.labels(layer);
  std::vector<std::string> surfaces;
  surfaces.reserve(sentence.size());
  for (const auto& tok : sentence.tokens) surfaces.push_back(tok.surface);
  return spans_from_labels(labels, surfaces);
}

inline std::vector<Label> bio_from_spans(std::size_t length, std::span<const EntitySpan> spans) {
  std::vector<Label> labels(length, Label::outside());
  std::vector<bool> taken(length, false);
  for (const auto& span : spans) {
    if (span.start >= span.end || span.end > length)
      throw Error("span [" + std::to_string(span.start) + ", " + std::to_string(span.end) +
                  ") out of bounds for length " + std::to_string(length));
    for (std::size_t k = span.start; k < span.end; ++k) {
      if (taken[k]) throw Error("overlapping spans at token " + std::to_string(k));
      taken[k] = true;
      labels[k] = k == span.start ? Label::begin(span.type) : Label::inside(span.type);
    }
  }
  return labels;
}

// ---------------------------------------------------------------------------
// CoNLL

inline constexpr std::string_view kDocStart = "-DOCSTART-";

struct ParsedCorpus {
  Corpus corpus;
  std::size_t repairs = 0;  // orphan I-T tags rewritten to B-T
};

namespace detail {

inline bool is_blank(std::string_view line) {
  for (char c : line)
    if (c != ' ' && c != '\t') return false;
  return true;
}

}  // namespace detail

inline ParsedCorpus parse_conll(std::istream& in) {
  ParsedCorpus result;
  Document doc;
  doc.docstart = false;
  Sentence sentence;
  std::vector<Label> labels;
  std::size_t line_no = 0;

  auto close_sentence = [&] {
    if (sentence.tokens.empty()) return;
    result.repairs += repair_bio(labels);
    sentence.set_labels(Layer::gold, labels);
    sentence.index = doc.sentences.size();
    doc.sentences.push_back(std::move(sentence));
    sentence = Sentence{};
    labels.clear();
  };
  auto close_document = [&] {
    close_sentence();
    if (!doc.sentences.empty()) {
      doc.id = std::to_string(result.corpus.documents.size());
      result.corpus.documents.push_back(std::move(doc));
    }
    doc = Document{};
  };

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (detail::is_blank(line)) {
      close_sentence();
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(line_no, "expected surface<TAB>tag");
    std::string_view surface(line.data(), tab);
    std::string_view tag(line.data() + tab + 1, line.size() - tab - 1);
    if (surface == kDocStart) {
      close_document();
      doc.docstart = true;
      continue;
    }
    if (tag.find('\t') != std::string_view::npos)
      throw ParseError(line_no, "expected exactly two tab-separated fields");
    if (surface.empty() || unicode::contains_space(surface))
      throw ParseError(line_no, "token surface must be non-empty and contain no whitespace");
    auto label = Label::parse(tag);
    if (!label) throw ParseError(line_no, "unknown tag '" + std::string(tag) + "'");
    sentence.tokens.push_back(Token{std::string(surface), std::nullopt, std::nullopt});
    labels.push_back(*label);
  }
  close_document();
  return result;
}

inline ParsedCorpus parse_conll(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_conll(in);
}

/// Writes one label layer. Throws when a token lacks that layer.
inline std::string write_conll(const Corpus& corpus, Layer layer) {
  std::string out;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    // Any document after the first needs its marker to survive a re-parse.
    if (doc.docstart || d > 0) {
      out += kDocStart;
      out += "\tO\n\n";
    }
    for (const auto& sentence : doc.sentences) {
      for (const auto& tok : sentence.tokens) {
        const auto& l = tok.label(layer);
        if (!l) throw Error("token '" + tok.surface + "' has no " +
                            (layer == Layer::gold ? "gold" : "predicted") + " label");
        out += tok.surface;
        out.push_back('\t');
        out += l->str();
        out.push_back('\n');
      }
      out.push_back('\n');
    }
  }
  return out;
}

/// Copy of `corpus` with one label layer removed.
inline Corpus strip_layer(Corpus corpus, Layer layer) {
  for (auto& doc : corpus.documents)
    for (auto& s : doc.sentences)
      for (auto& tok : s.tokens) tok.label(layer).reset();
  return corpus;
}

}  // namespace mica

#endif  // MICA_CORPUS_HPP
