#ifndef MICA_FEATURES_HPP
#define MICA_FEATURES_HPP

// Handcrafted per-token feature templates (CoNLL-2002 tutorial set minus
// part-of-speech). Key grammar, stable because model files store keys:
//
//   bias
//   w.lower=<lowercased token>
//   suffix3=<last 3 chars>      suffix2=<last 2 chars>
//   w.isupper   w.istitle   w.isdigit
//   -1:<key> / +1:<key>         neighbour copies of bias, w.lower, w.isupper,
//                               w.istitle, w.isdigit
//   BOS / EOS                   first / last token of the sentence
//
// Template features have value 1.0. Real-valued keys (sim:<TYPE>) are added
// later by mica::enrich.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/error.hpp"
#include "mica/unicode.hpp"

namespace mica {

class FeatureVector {
 public:
  using container = std::map<std::string, double, std::less<>>;

  /// Inserts a new key; throws if the key is already present.
  void add(std::string key, double value) {
    auto [it, inserted] = entries_.emplace(std::move(key), value);
    if (!inserted) throw Error("duplicate feature key '" + it->first + "'");
  }

  bool contains(std::string_view key) const { return entries_.find(key) != entries_.end(); }

  std::optional<double> value(std::string_view key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  container::const_iterator begin() const { return entries_.begin(); }
  container::const_iterator end() const { return entries_.end(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  container entries_;
};

namespace detail {

struct WordShape {
  std::string lower;
  std::string suffix3;
  std::string suffix2;
  bool isupper = false;
  bool istitle = false;
  bool isdigit = false;
};

inline WordShape word_shape(std::string_view surface) {
  const std::u32string cps = unicode::decode(surface);
  WordShape shape;
  shape.lower = unicode::encode(unicode::fold(cps));

  auto suffix = [&](std::size_t k) {
    const std::size_t start = cps.size() > k ? cps.size() - k : 0;
    return unicode::encode(std::u32string_view(cps).substr(start));
  };
  shape.suffix3 = suffix(3);
  shape.suffix2 = suffix(2);

  bool any_cased = false;
  bool any_lower = false;
  for (char32_t c : cps) {
    any_cased |= unicode::is_cased(c);
    any_lower |= unicode::is_lower(c);
  }
  shape.isupper = any_cased && !any_lower;

  if (!cps.empty() && unicode::is_upper(cps.front())) {
    shape.istitle = true;
    for (std::size_t i = 1; i < cps.size(); ++i)
      if (unicode::is_upper(cps[i])) {
        shape.istitle = false;
        break;
      }
  }

  shape.isdigit = !cps.empty();
  for (char32_t c : cps)
    if (!unicode::is_decimal_digit(c)) {
      shape.isdigit = false;
      break;
    }
  return shape;
}

inline void add_word_features(FeatureVector& fv, const WordShape& shape, std::string_view prefix) {
  const std::string p(prefix);
  fv.add(p + "bias", 1.0);
  fv.add(p + "w.lower=" + shape.lower, 1.0);
  if (shape.isupper) fv.add(p + "w.isupper", 1.0);
  if (shape.istitle) fv.add(p + "w.istitle", 1.0);
  if (shape.isdigit) fv.add(p + "w.isdigit", 1.0);
}

}  // namespace detail

inline FeatureVector extract_features(std::span<const std::string> tokens, std::size_t position) {
  if (position >= tokens.size())
    throw Error("feature position " + std::to_string(position) + " out of range for length " +
                std::to_string(tokens.size()));
  FeatureVector fv;
  const auto cur = detail::word_shape(tokens[position]);
  detail::add_word_features(fv, cur, "");
  fv.add("suffix3=" + cur.suffix3, 1.0);
  fv.add("suffix2=" + cur.suffix2, 1.0);

  if (position > 0)
    detail::add_word_features(fv, detail::word_shape(tokens[position - 1]), "-1:");
  else
    fv.add("BOS", 1.0);

  if (position + 1 < tokens.size())
    detail::add_word_features(fv, detail::word_shape(tokens[position + 1]), "+1:");
  else
    fv.add("EOS", 1.0);
  return fv;
}

inline std::vector<std::string> surfaces(const Sentence& sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.size());
  for (const auto& tok : sentence.tokens) out.push_back(tok.surface);
  return out;
}

inline FeatureVector extract_features(const Sentence& sentence, std::size_t position) {
  return extract_features(surfaces(sentence), position);
}

/// Feature vectors for every position of a sentence.
inline std::vector<FeatureVector> sentence_features(const Sentence& sentence) {
  const auto words = surfaces(sentence);
  std::vector<FeatureVector> out;
  out.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) out.push_back(extract_features(words, i));
  return out;
}

}  // namespace mica

#endif  // MICA_FEATURES_HPP
