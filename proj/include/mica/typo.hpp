#ifndef MICA_TYPO_HPP
#define MICA_TYPO_HPP

// Seeded typo injection for robustness experiments.
//
// Each targeted token is corrupted with probability `rate` by one operation
// drawn uniformly from the enabled set. Character operations work on
// Unicode scalar values and insert/substitute random ASCII lowercase letters.
// merge_space glues a token to the next one in the sentence ("MS." +
// "LAVERGNE" -> "MS.LAVERGNE"); the merged tag is the left tag, except that
// O followed by B-T yields B-T.
//
// All randomness comes from one mt19937_64 stream consumed in corpus order,
// so a fixed seed reproduces both the corpus and the log exactly.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/error.hpp"
#include "mica/unicode.hpp"

namespace mica {

enum class TypoOp { substitute, remove, insert, transpose, merge_space };

inline constexpr std::array<TypoOp, 5> kAllTypoOps = {TypoOp::substitute, TypoOp::remove, TypoOp::insert,
                                                      TypoOp::transpose, TypoOp::merge_space};

constexpr std::string_view to_string(TypoOp op) {
  switch (op) {
    case TypoOp::substitute: return "substitute";
    case TypoOp::remove: return "delete";
    case TypoOp::insert: return "insert";
    case TypoOp::transpose: return "transpose";
    case TypoOp::merge_space: return "merge_space";
  }
  return "?";
}

inline std::optional<TypoOp> parse_typo_op(std::string_view s) {
  for (TypoOp op : kAllTypoOps)
    if (to_string(op) == s) return op;
  return std::nullopt;
}

enum class TypoTarget { entities_only, all_tokens };

struct TypoConfig {
  double rate = 0.15;
  std::vector<TypoOp> operations{kAllTypoOps.begin(), kAllTypoOps.end()};
  TypoTarget target = TypoTarget::entities_only;
  std::uint64_t seed = 1;
};

struct CorruptionRecord {
  std::string doc_id;
  std::size_t sentence = 0;
  std::size_t position = 0;  // token index in the input sentence
  TypoOp operation = TypoOp::substitute;
  std::string before;
  std::string after;

  friend bool operator==(const CorruptionRecord&, const CorruptionRecord&) = default;
};

struct TypoResult {
  Corpus corpus;
  std::vector<CorruptionRecord> log;
};

namespace detail {

class TypoRng {
 public:
  explicit TypoRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(gen_() % n); }
  char32_t letter() { return U'a' + static_cast<char32_t>(below(26)); }

 private:
  std::mt19937_64 gen_;
};

// Returns nullopt when the operation does not apply to this token.
inline std::optional<std::string> corrupt_chars(std::string_view surface, TypoOp op, TypoRng& rng) {
  std::u32string cps = unicode::decode(surface);
  switch (op) {
    case TypoOp::substitute: {
      const std::size_t pos = rng.below(cps.size());
      char32_t c = rng.letter();
      while (c == cps[pos]) c = rng.letter();
      cps[pos] = c;
      break;
    }
    case TypoOp::remove: {
      if (cps.size() < 2) return std::nullopt;
      cps.erase(rng.below(cps.size()), 1);
      break;
    }
    case TypoOp::insert: {
      const std::size_t pos = rng.below(cps.size() + 1);
      cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(pos), rng.letter());
      break;
    }
    case TypoOp::transpose: {
      // Only pairs of distinct characters, so the swap is visible.
      std::vector<std::size_t> pairs;
      for (std::size_t i = 0; i + 1 < cps.size(); ++i)
        if (cps[i] != cps[i + 1]) pairs.push_back(i);
      if (pairs.empty()) return std::nullopt;
      const std::size_t pos = pairs[rng.below(pairs.size())];
      std::swap(cps[pos], cps[pos + 1]);
      break;
    }
    case TypoOp::merge_space:
      return std::nullopt;
  }
  return unicode::encode(cps);
}

inline std::optional<Label> merged_label(const std::optional<Label>& left, const std::optional<Label>& right) {
  if (!left || !right) return std::nullopt;
  if (left->is_outside() && right->is_begin()) return right;
  return left;
}

}  // namespace detail

inline TypoResult inject(const Corpus& corpus, const TypoConfig& config) {
  if (!(config.rate >= 0.0 && config.rate <= 1.0)) throw Error("typo rate must lie in [0, 1]");
  if (config.operations.empty()) throw Error("at least one typo operation must be enabled");

  detail::TypoRng rng(config.seed);
  TypoResult result;
  result.corpus.documents.reserve(corpus.documents.size());

  for (const auto& doc : corpus.documents) {
    Document out_doc{doc.id, {}, doc.docstart};
    for (const auto& sentence : doc.sentences) {
      Sentence out{{}, sentence.index};
      const auto& toks = sentence.tokens;
      bool merged_any = false;
      for (std::size_t i = 0; i < toks.size(); ++i) {
        const Token& tok = toks[i];
        const bool targeted = config.target == TypoTarget::all_tokens || (tok.gold && !tok.gold->is_outside());
        if (!targeted || !(rng.uniform() < config.rate)) {
          out.tokens.push_back(tok);
          continue;
        }
        const TypoOp op = config.operations[rng.below(config.operations.size())];
        if (op == TypoOp::merge_space) {
          if (i + 1 >= toks.size()) {
            out.tokens.push_back(tok);
            continue;
          }
          const Token& next = toks[i + 1];
          Token merged{tok.surface + next.surface, detail::merged_label(tok.gold, next.gold),
                       detail::merged_label(tok.predicted, next.predicted)};
          result.log.push_back({doc.id, sentence.index, i, op, tok.surface, merged.surface});
          out.tokens.push_back(std::move(merged));
          merged_any = true;
          ++i;
          continue;
        }
        auto changed = detail::corrupt_chars(tok.surface, op, rng);
        if (!changed) {
          out.tokens.push_back(tok);
          continue;
        }
        result.log.push_back({doc.id, sentence.index, i, op, tok.surface, *changed});
        Token t = tok;
        t.surface = std::move(*changed);
        out.tokens.push_back(std::move(t));
      }
      if (merged_any) {
        for (Layer layer : {Layer::gold, Layer::predicted}) {
          const bool complete = std::all_of(out.tokens.begin(), out.tokens.end(),
                                            [&](const Token& t) { return t.label(layer).has_value(); });
          if (!complete) continue;
          auto labels = out.labels(layer);
          repair_bio(labels);
          out.set_labels(layer, labels);
        }
      }
      out_doc.sentences.push_back(std::move(out));
    }
    result.corpus.documents.push_back(std::move(out_doc));
  }
  return result;
}

namespace detail {

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

/// CSV with header doc_id,sentence,position,operation,before,after.
inline std::string corruption_log_csv(std::span<const CorruptionRecord> log) {
  std::string out = "doc_id,sentence,position,operation,before,after\n";
  for (const auto& r : log)
    out += detail::csv_field(r.doc_id) + "," + std::to_string(r.sentence) + "," + std::to_string(r.position) +
           "," + std::string(to_string(r.operation)) + "," + detail::csv_field(r.before) + "," +
           detail::csv_field(r.after) + "\n";
  return out;
}

}  // namespace mica

#endif  // MICA_TYPO_HPP
