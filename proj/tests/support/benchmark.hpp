// Synthetic typo-robustness benchmark shared by the acceptance runner and
// the slow tests: 300 generated documents, the first 200 for training and
// the rest for testing, with the test split corrupted at rate 0.15.
#pragma once

#include <cstdint>
#include <vector>

#include "mica/eval.hpp"
#include "mica/mica.hpp"
#include "mica/synthetic.hpp"
#include "mica/typo.hpp"

namespace bench {

struct Split {
  mica::Corpus train;
  mica::Corpus test;
  mica::Corpus noisy;
};

inline Split make_split(std::uint64_t seed, std::size_t documents = 300, std::size_t train_documents = 200) {
  mica::synthetic::SyntheticConfig sc;
  sc.documents = documents;
  sc.seed = seed;
  const mica::Corpus all = mica::synthetic::generate(sc);
  Split s;
  for (std::size_t i = 0; i < all.documents.size(); ++i)
    (i < train_documents ? s.train : s.test).documents.push_back(all.documents[i]);
  mica::TypoConfig tc;
  tc.rate = 0.15;
  tc.target = mica::TypoTarget::entities_only;
  tc.seed = seed + 100;
  s.noisy = mica::inject(s.test, tc).corpus;
  return s;
}

inline mica::EvalReport evaluate(const mica::Corpus& corpus, const std::vector<mica::DocumentLabels>& labels) {
  mica::Corpus out = corpus;
  for (std::size_t d = 0; d < out.documents.size(); ++d)
    for (std::size_t s = 0; s < out.documents[d].sentences.size(); ++s)
      out.documents[d].sentences[s].set_labels(mica::Layer::predicted, labels[d][s]);
  return mica::score(corpus, out, mica::Layer::predicted);
}

/// Trained pass 1 plus its predictions on the training split.
struct Baseline {
  mica::CrfModel model;
  std::vector<mica::DocumentLabels> train_predictions;
};

inline Baseline train_baseline(const Split& split, const mica::TrainConfig& cfg) {
  Baseline b{mica::train(mica::handcrafted_training_data(split.train), cfg), {}};
  b.train_predictions = mica::decode_corpus(split.train, b.model);
  return b;
}

inline mica::EvalReport baseline_report(const Baseline& b, const mica::Corpus& corpus) {
  return evaluate(corpus, mica::decode_corpus(corpus, b.model));
}

inline mica::EvalReport mica_report(const Split& split, const Baseline& b, std::size_t window,
                                    const mica::TrainConfig& cfg, const mica::Corpus& corpus) {
  const mica::ContextConfig ctx{window, true};
  const mica::CrfModel pass2 = mica::train_second_pass(split.train, b.train_predictions, ctx, cfg);
  std::vector<mica::DocumentLabels> labels;
  for (const auto& doc : corpus.documents) labels.push_back(mica::two_pass_predict(doc, b.model, pass2, ctx));
  return evaluate(corpus, labels);
}

}  // namespace bench
