#ifndef MICA_MICA_HPP
#define MICA_MICA_HPP

// Two-pass tagging with contextual entity dictionaries.
//
// Pass 1 is a CRF over handcrafted features. Its predictions on the
// sentences around sentence k (window sentences on each side, clipped to
// the document) form a per-type candidate dictionary. Each token of k is
// compared against every candidate of each type:
//
//   s_T(w) = max_c lev_sim(w, c) + lcs_sim(w, c*)     (0 if no candidates)
//
// where c* is a candidate attaining the max (shortest, then lexicographically
// smallest, on ties). The four scores are appended to the token's features
// as sim:PER, sim:PRO, sim:LOC, sim:DATE and a second CRF is trained on the
// enriched input. Pass-2 training dictionaries come from pass-1
// predictions on the training set, never from gold labels.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/crf.hpp"
#include "mica/error.hpp"
#include "mica/features.hpp"
#include "mica/strsim.hpp"
#include "mica/unicode.hpp"

namespace mica {

struct ContextConfig {
  std::size_t window = 0;  // sentences on each side
  bool include_current = true;
};

/// Per-type candidate strings, case-folded, deduplicated, kept sorted.
class EntityDictionary {
 public:
  /// Folds and inserts; empty strings and duplicates are ignored.
  void add(EntityType type, std::string_view candidate) {
    std::u32string folded = unicode::fold(unicode::decode(candidate));
    if (folded.empty()) return;
    auto& list = entries_[static_cast<std::size_t>(type)];
    auto it = std::lower_bound(list.begin(), list.end(), folded,
                               [](const Entry& e, const std::u32string& s) { return e.folded < s; });
    if (it != list.end() && it->folded == folded) return;
    std::string text = unicode::encode(folded);
    list.insert(it, Entry{std::move(folded), std::move(text)});
  }

  std::vector<std::string> candidates(EntityType type) const {
    std::vector<std::string> out;
    for (const auto& e : entries_[static_cast<std::size_t>(type)]) out.push_back(e.text);
    return out;
  }

  std::size_t size(EntityType type) const { return entries_[static_cast<std::size_t>(type)].size(); }

  bool empty() const {
    for (const auto& list : entries_)
      if (!list.empty()) return false;
    return true;
  }

  struct Entry {
    std::u32string folded;
    std::string text;
  };
  std::span<const Entry> entries(EntityType type) const { return entries_[static_cast<std::size_t>(type)]; }

 private:
  std::array<std::vector<Entry>, kNumEntityTypes> entries_;
};

struct SimilarityVector {
  std::array<double, kNumEntityTypes> scores{};

  double operator[](EntityType t) const { return scores[static_cast<std::size_t>(t)]; }
  double& operator[](EntityType t) { return scores[static_cast<std::size_t>(t)]; }
  friend bool operator==(const SimilarityVector&, const SimilarityVector&) = default;
};

inline std::string similarity_key(EntityType t) { return "sim:" + std::string(to_string(t)); }

/// Candidates from the pass-1 predictions of sentences
/// [index - window, index + window] of `document`.
inline EntityDictionary build_dictionary(const Document& document, std::size_t sentence_index,
                                         std::span<const std::vector<Label>> predictions,
                                         const ContextConfig& config) {
  const std::size_t n = document.sentences.size();
  if (sentence_index >= n)
    throw Error("sentence index " + std::to_string(sentence_index) + " out of range for document '" +
                document.id + "' with " + std::to_string(n) + " sentences");
  const std::size_t lo = sentence_index - std::min(sentence_index, config.window);
  const std::size_t hi = std::min(n - 1, sentence_index + std::min(config.window, n));

  EntityDictionary dict;
  for (std::size_t s = lo; s <= hi; ++s) {
    if (s == sentence_index && !config.include_current) continue;
    const Sentence& sentence = document.sentences[s];
    if (s >= predictions.size() || predictions[s].size() != sentence.size())
      throw Error("missing pass-1 predictions for sentence " + std::to_string(s));
    const auto words = surfaces(sentence);
    for (const auto& span : spans_from_labels(predictions[s], words)) {
      dict.add(span.type, span.surface);
      for (std::size_t k = span.start; k < span.end; ++k) dict.add(span.type, words[k]);
    }
  }
  return dict;
}

inline SimilarityVector similarity_vector(std::string_view word, const EntityDictionary& dictionary) {
  const std::u32string folded = unicode::fold(unicode::decode(word));
  SimilarityVector out;
  for (EntityType t : kEntityTypes) {
    const auto entries = dictionary.entries(t);
    if (entries.empty()) continue;
    const EntityDictionary::Entry* best = nullptr;
    double best_sim = -1.0;
    for (const auto& e : entries) {
      const double sim = strsim::lev_similarity(folded, e.folded);
      if (sim > best_sim) {
        best_sim = sim, best = &e;
      } else if (sim == best_sim &&
                 (e.folded.size() < best->folded.size() ||
                  (e.folded.size() == best->folded.size() && e.folded < best->folded))) {
        best = &e;
      }
    }
    out[t] = best_sim + strsim::lcs_similarity(folded, best->folded);
  }
  return out;
}

/// `features` plus the four sim:<TYPE> entries.
inline FeatureVector enrich(FeatureVector features, const SimilarityVector& s) {
  for (EntityType t : kEntityTypes) {
    const std::string key = similarity_key(t);
    if (features.contains(key)) throw Error("feature vector already carries " + key);
    features.add(key, s[t]);
  }
  return features;
}

inline bool has_similarity_features(const CrfModel& model) {
  for (EntityType t : kEntityTypes)
    if (model.feature_id(similarity_key(t))) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Pipeline

using DocumentLabels = std::vector<std::vector<Label>>;  // one entry per sentence

/// Viterbi over handcrafted features for every sentence. Reads surfaces only.
inline DocumentLabels decode_document(const Document& document, const CrfModel& model) {
  DocumentLabels out;
  out.reserve(document.sentences.size());
  for (const auto& sentence : document.sentences) out.push_back(viterbi(model, sentence_features(sentence)).labels);
  return out;
}

inline std::vector<DocumentLabels> decode_corpus(const Corpus& corpus, const CrfModel& model) {
  std::vector<DocumentLabels> out;
  out.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) out.push_back(decode_document(doc, model));
  return out;
}

/// Enriched features of one sentence given pass-1 predictions for its document.
inline std::vector<FeatureVector> enriched_features(const Document& document, std::size_t sentence_index,
                                                    std::span<const std::vector<Label>> predictions,
                                                    const ContextConfig& config) {
  const auto dict = build_dictionary(document, sentence_index, predictions, config);
  const Sentence& sentence = document.sentences[sentence_index];
  auto features = sentence_features(sentence);
  for (std::size_t i = 0; i < sentence.size(); ++i)
    features[i] = enrich(std::move(features[i]), similarity_vector(sentence.tokens[i].surface, dict));
  return features;
}

inline std::vector<LabeledSequence> handcrafted_training_data(const Corpus& corpus) {
  std::vector<LabeledSequence> data;
  data.reserve(corpus.sentence_count());
  for (const auto& doc : corpus.documents)
    for (const auto& s : doc.sentences) data.push_back({sentence_features(s), s.labels(Layer::gold)});
  return data;
}

/// Trains the pass-2 model from frozen pass-1 predictions on `corpus`.
inline CrfModel train_second_pass(const Corpus& corpus, std::span<const DocumentLabels> pass1_predictions,
                                  const ContextConfig& config, const TrainConfig& crf_config,
                                  const EpochObserver& observer = {}) {
  if (pass1_predictions.size() != corpus.documents.size())
    throw Error("pass-1 predictions do not cover the training corpus");
  std::vector<LabeledSequence> data;
  data.reserve(corpus.sentence_count());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const auto& doc = corpus.documents[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s)
      data.push_back({enriched_features(doc, s, pass1_predictions[d], config),
                      doc.sentences[s].labels(Layer::gold)});
  }
  return train(data, crf_config, observer);
}

struct TwoPassModels {
  CrfModel pass1;
  CrfModel pass2;
};

inline TwoPassModels two_pass_train(const Corpus& train_corpus, const ContextConfig& config,
                                    const TrainConfig& crf_config) {
  const auto data = handcrafted_training_data(train_corpus);
  CrfModel pass1 = train(data, crf_config);
  const auto predictions = decode_corpus(train_corpus, pass1);
  CrfModel pass2 = train_second_pass(train_corpus, predictions, config, crf_config);
  return {std::move(pass1), std::move(pass2)};
}

/// Pass-2 decoding of a document given its pass-1 predictions.
inline DocumentLabels decode_second_pass(const Document& document, std::span<const std::vector<Label>> pass1_predictions,
                                         const CrfModel& pass2, const ContextConfig& config) {
  DocumentLabels out;
  out.reserve(document.sentences.size());
  for (std::size_t s = 0; s < document.sentences.size(); ++s)
    out.push_back(viterbi(pass2, enriched_features(document, s, pass1_predictions, config)).labels);
  return out;
}

inline DocumentLabels two_pass_predict(const Document& document, const CrfModel& pass1, const CrfModel& pass2,
                                       const ContextConfig& config) {
  const auto first = decode_document(document, pass1);
  return decode_second_pass(document, first, pass2, config);
}

}  // namespace mica

#endif  // MICA_MICA_HPP
