#ifndef MICA_CRF_HPP
#define MICA_CRF_HPP

// Linear-chain CRF with real-valued sparse features.
//
//   score(x, y) = sum_i sum_k x_ik * E[k, y_i]  +  sum_{i>0} T[y_{i-1}, y_i]
//
// Parameters live in one flat vector: the L x L transition block first,
// then one row of L emission weights per vocabulary feature. Feature keys
// absent from the vocabulary contribute nothing at inference.
//
// Model file (text, UTF-8):
//   mica-crf v1
//   <comma-joined labels>
//   T<TAB>from<TAB>to<TAB>weight          (all L*L pairs, label order)
//   E<TAB>feature<TAB>label<TAB>weight    (vocabulary sorted, label order)
// Weights use 17 significant digits so a load/save cycle is bit-exact.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/error.hpp"
#include "mica/features.hpp"

namespace mica {

class CrfModel {
 public:
  /// All nine labels, empty vocabulary, zero weights.
  CrfModel() : CrfModel(std::vector<Label>(kAllLabels.begin(), kAllLabels.end()), {}) {}

  CrfModel(std::vector<Label> labels, std::vector<std::string> vocabulary)
      : labels_(std::move(labels)), vocabulary_(std::move(vocabulary)) {
    if (labels_.empty()) throw Error("a CRF needs at least one label");
    label_index_.fill(-1);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      auto& slot = label_index_[labels_[i].code()];
      if (slot >= 0) throw Error("duplicate label " + labels_[i].str());
      slot = static_cast<int>(i);
    }
    std::sort(vocabulary_.begin(), vocabulary_.end());
    vocabulary_.erase(std::unique(vocabulary_.begin(), vocabulary_.end()), vocabulary_.end());
    feature_index_.reserve(vocabulary_.size());
    for (std::size_t f = 0; f < vocabulary_.size(); ++f) feature_index_.emplace(vocabulary_[f], f);
    params_.assign(num_labels() * num_labels() + vocabulary_.size() * num_labels(), 0.0);
  }

  const std::vector<Label>& labels() const { return labels_; }
  std::size_t num_labels() const { return labels_.size(); }
  const std::vector<std::string>& vocabulary() const { return vocabulary_; }
  std::size_t num_features() const { return vocabulary_.size(); }

  std::optional<std::size_t> label_index(Label l) const {
    const int i = label_index_[l.code()];
    if (i < 0) return std::nullopt;
    return static_cast<std::size_t>(i);
  }

  std::optional<std::size_t> feature_id(const std::string& key) const {
    auto it = feature_index_.find(key);
    if (it == feature_index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t transition_offset(std::size_t from, std::size_t to) const {
    return from * num_labels() + to;
  }
  std::size_t emission_offset(std::size_t feature, std::size_t label) const {
    return num_labels() * num_labels() + feature * num_labels() + label;
  }

  double transition(std::size_t from, std::size_t to) const { return params_[transition_offset(from, to)]; }
  double& transition(std::size_t from, std::size_t to) { return params_[transition_offset(from, to)]; }
  double emission(std::size_t feature, std::size_t label) const { return params_[emission_offset(feature, label)]; }
  double& emission(std::size_t feature, std::size_t label) { return params_[emission_offset(feature, label)]; }

  std::span<const double> parameters() const { return params_; }
  std::span<double> parameters() { return params_; }

  friend bool operator==(const CrfModel& a, const CrfModel& b) {
    return a.labels_ == b.labels_ && a.vocabulary_ == b.vocabulary_ && a.params_ == b.params_;
  }

 private:
  std::vector<Label> labels_;
  std::vector<std::string> vocabulary_;
  std::array<int, kNumLabels> label_index_{};
  std::unordered_map<std::string, std::size_t> feature_index_;
  std::vector<double> params_;
};

struct LabeledSequence {
  std::vector<FeatureVector> features;
  std::vector<Label> labels;
};

struct Decoded {
  std::vector<Label> labels;
  double score = 0.0;
};

struct NllResult {
  double loss = 0.0;
  std::vector<double> gradient;  // same layout as CrfModel::parameters()
};

struct TrainConfig {
  int epochs = 30;
  double learning_rate = 0.1;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  bool shuffle = true;
  std::size_t batch_size = 8;
};

/// Called with (epoch, objective). Epoch 0 is the untrained model.
using EpochObserver = std::function<void(int, double)>;

namespace detail {

// Feature ids and values for each position, unseen keys dropped.
struct CompiledSequence {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> positions;
  std::vector<std::size_t> gold;  // label indices; empty when unlabeled
};

inline CompiledSequence compile(const CrfModel& model, std::span<const FeatureVector> features) {
  CompiledSequence seq;
  seq.positions.resize(features.size());
  for (std::size_t t = 0; t < features.size(); ++t) {
    auto& row = seq.positions[t];
    row.reserve(features[t].size());
    for (const auto& [key, value] : features[t])
      if (auto id = model.feature_id(key)) row.emplace_back(static_cast<std::uint32_t>(*id), value);
  }
  return seq;
}

inline std::vector<std::size_t> label_indices(const CrfModel& model, std::span<const Label> labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  for (Label l : labels) {
    auto i = model.label_index(l);
    if (!i) throw Error("label " + l.str() + " is not in the model's label set");
    out.push_back(*i);
  }
  return out;
}

inline CompiledSequence compile(const CrfModel& model, const LabeledSequence& seq) {
  if (seq.features.size() != seq.labels.size())
    throw Error("feature and label sequences differ in length");
  CompiledSequence out = compile(model, seq.features);
  out.gold = label_indices(model, seq.labels);
  return out;
}

// n x L matrix of per-position label scores.
inline std::vector<double> emission_scores(const CrfModel& model, const CompiledSequence& seq) {
  const std::size_t L = model.num_labels();
  const auto params = model.parameters();
  std::vector<double> scores(seq.positions.size() * L, 0.0);
  for (std::size_t t = 0; t < seq.positions.size(); ++t) {
    double* row = &scores[t * L];
    for (const auto& [f, value] : seq.positions[t]) {
      const double* w = &params[model.emission_offset(f, 0)];
      for (std::size_t y = 0; y < L; ++y) row[y] += value * w[y];
    }
  }
  return scores;
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double x : xs) hi = std::max(hi, x);
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double x : xs) sum += std::exp(x - hi);
  return hi + std::log(sum);
}

// alpha[t*L + y] = log sum of exp(score) over prefixes ending in y at t.
inline std::vector<double> forward(const CrfModel& model, std::span<const double> emis, std::size_t n) {
  const std::size_t L = model.num_labels();
  std::vector<double> alpha(n * L);
  std::vector<double> terms(L);
  for (std::size_t y = 0; y < L; ++y) alpha[y] = emis[y];
  for (std::size_t t = 1; t < n; ++t)
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t p = 0; p < L; ++p) terms[p] = alpha[(t - 1) * L + p] + model.transition(p, y);
      alpha[t * L + y] = log_sum_exp(terms) + emis[t * L + y];
    }
  return alpha;
}

// beta[t*L + y] = log sum of exp(score) over suffixes after t given y at t.
inline std::vector<double> backward(const CrfModel& model, std::span<const double> emis, std::size_t n) {
  const std::size_t L = model.num_labels();
  std::vector<double> beta(n * L, 0.0);
  std::vector<double> terms(L);
  for (std::size_t t = n - 1; t-- > 0;)
    for (std::size_t y = 0; y < L; ++y) {
      for (std::size_t q = 0; q < L; ++q)
        terms[q] = model.transition(y, q) + emis[(t + 1) * L + q] + beta[(t + 1) * L + q];
      beta[t * L + y] = log_sum_exp(terms);
    }
  return beta;
}

inline double gold_score(const CrfModel& model, std::span<const double> emis,
                         std::span<const std::size_t> gold) {
  const std::size_t L = model.num_labels();
  double s = 0.0;
  for (std::size_t t = 0; t < gold.size(); ++t) {
    s += emis[t * L + gold[t]];
    if (t > 0) s += model.transition(gold[t - 1], gold[t]);
  }
  return s;
}

// Adds (expected - empirical) counts for one sequence into `grad` and
// returns log Z - score(gold).
inline double accumulate_nll(const CrfModel& model, const CompiledSequence& seq,
                             std::span<double> grad) {
  const std::size_t n = seq.positions.size();
  const std::size_t L = model.num_labels();
  if (n == 0) return 0.0;
  const auto emis = emission_scores(model, seq);
  const auto alpha = forward(model, emis, n);
  const auto beta = backward(model, emis, n);
  const double log_z = log_sum_exp(std::span<const double>(alpha).subspan((n - 1) * L, L));

  std::vector<double> marginal(L);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) marginal[y] = std::exp(alpha[t * L + y] + beta[t * L + y] - log_z);
    marginal[seq.gold[t]] -= 1.0;
    for (const auto& [f, value] : seq.positions[t]) {
      double* g = &grad[model.emission_offset(f, 0)];
      for (std::size_t y = 0; y < L; ++y) g[y] += value * marginal[y];
    }
  }
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t p = 0; p < L; ++p)
      for (std::size_t q = 0; q < L; ++q) {
        const double lp = alpha[(t - 1) * L + p] + model.transition(p, q) + emis[t * L + q] +
                          beta[t * L + q] - log_z;
        grad[model.transition_offset(p, q)] += std::exp(lp);
      }
    grad[model.transition_offset(seq.gold[t - 1], seq.gold[t])] -= 1.0;
  }
  return log_z - gold_score(model, emis, seq.gold);
}

inline double squared_norm(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x * x;
  return s;
}

inline Decoded viterbi(const CrfModel& model, const CompiledSequence& seq) {
  const std::size_t n = seq.positions.size();
  const std::size_t L = model.num_labels();
  if (n == 0) return {};
  const auto emis = emission_scores(model, seq);
  std::vector<double> best(emis.begin(), emis.begin() + static_cast<std::ptrdiff_t>(L));
  std::vector<double> next(L);
  std::vector<std::size_t> back(n * L, 0);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t y = 0; y < L; ++y) {
      // Strict comparison keeps the lowest index among ties.
      std::size_t arg = 0;
      double top = best[0] + model.transition(0, y);
      for (std::size_t p = 1; p < L; ++p) {
        const double s = best[p] + model.transition(p, y);
        if (s > top) top = s, arg = p;
      }
      next[y] = top + emis[t * L + y];
      back[t * L + y] = arg;
    }
    std::swap(best, next);
  }
  std::size_t last = 0;
  for (std::size_t y = 1; y < L; ++y)
    if (best[y] > best[last]) last = y;

  Decoded out;
  out.score = best[last];
  out.labels.resize(n);
  std::size_t y = last;
  for (std::size_t t = n; t-- > 0;) {
    out.labels[t] = model.labels()[y];
    y = back[t * L + y];
  }
  return out;
}

inline std::string format_weight(double w) {
  std::array<char, 64> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), w, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

inline std::optional<double> parse_weight(std::string_view s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

}  // namespace detail

inline double sequence_score(const CrfModel& model, std::span<const FeatureVector> features,
                             std::span<const Label> labels) {
  if (features.size() != labels.size()) throw Error("feature and label sequences differ in length");
  if (features.empty()) throw Error("cannot score an empty sequence");
  const auto seq = detail::compile(model, features);
  const auto emis = detail::emission_scores(model, seq);
  return detail::gold_score(model, emis, detail::label_indices(model, labels));
}

inline double log_partition(const CrfModel& model, std::span<const FeatureVector> features) {
  if (features.empty()) throw Error("cannot normalize an empty sequence");
  const auto seq = detail::compile(model, features);
  const auto emis = detail::emission_scores(model, seq);
  const auto alpha = detail::forward(model, emis, features.size());
  const std::size_t L = model.num_labels();
  return detail::log_sum_exp(std::span<const double>(alpha).subspan((features.size() - 1) * L, L));
}

/// Highest-scoring labeling. Ties go to the lowest label index.
inline Decoded viterbi(const CrfModel& model, std::span<const FeatureVector> features) {
  if (features.empty()) throw Error("cannot decode an empty sequence");
  return detail::viterbi(model, detail::compile(model, features));
}

/// Negative log-likelihood of the batch plus (l2/2)*|w|^2, with its gradient.
inline NllResult nll_and_gradient(const CrfModel& model, std::span<const LabeledSequence> batch,
                                  double l2) {
  NllResult out;
  out.gradient.assign(model.parameters().size(), 0.0);
  for (const auto& seq : batch) out.loss += detail::accumulate_nll(model, detail::compile(model, seq), out.gradient);
  const auto w = model.parameters();
  out.loss += 0.5 * l2 * detail::squared_norm(w);
  for (std::size_t i = 0; i < w.size(); ++i) out.gradient[i] += l2 * w[i];
  return out;
}

/// Mini-batch SGD on  sum_n nll_n + (l2/2)|w|^2, step size lr/(1+epoch).
///
/// Each step moves along  mean_batch(grad nll) + (l2/N) w, i.e. the full
/// objective's gradient scaled by 1/N. The vocabulary is every feature key
/// in `data`; the label set is all nine labels. Deterministic for a fixed
/// config: shuffling uses a seeded mt19937_64 and an explicit Fisher-Yates.
inline CrfModel train(std::span<const LabeledSequence> data, const TrainConfig& config,
                      const EpochObserver& observer = {}) {
  if (data.empty()) throw Error("cannot train on an empty data set");
  if (config.epochs < 0) throw Error("epochs must be non-negative");
  if (!(config.learning_rate > 0.0)) throw Error("learning rate must be positive");
  if (!(config.l2 >= 0.0)) throw Error("l2 must be non-negative");
  if (config.batch_size == 0) throw Error("batch size must be positive");

  std::vector<std::string> vocabulary;
  {
    std::vector<std::string> keys;
    for (const auto& seq : data)
      for (const auto& fv : seq.features)
        for (const auto& entry : fv) keys.push_back(entry.first);
    vocabulary = std::move(keys);
  }
  CrfModel model(std::vector<Label>(kAllLabels.begin(), kAllLabels.end()), std::move(vocabulary));

  std::vector<detail::CompiledSequence> compiled;
  compiled.reserve(data.size());
  for (const auto& seq : data) compiled.push_back(detail::compile(model, seq));

  const auto objective = [&] {
    std::vector<double> scratch(model.parameters().size(), 0.0);
    double loss = 0.0;
    for (const auto& seq : compiled) loss += detail::accumulate_nll(model, seq, scratch);
    return loss + 0.5 * config.l2 * detail::squared_norm(model.parameters());
  };

  if (config.epochs == 0) return model;
  if (observer) observer(0, objective());

  const std::size_t n = compiled.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  std::vector<double> grad(model.parameters().size());
  const double decay = config.l2 / static_cast<double>(n);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle)
      for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
    const double lr = config.learning_rate / (1.0 + epoch);
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t stop = std::min(n, start + config.batch_size);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) detail::accumulate_nll(model, compiled[order[k]], grad);
      const double scale = 1.0 / static_cast<double>(stop - start);
      auto w = model.parameters();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * (grad[i] * scale + decay * w[i]);
    }
    if (observer) observer(epoch + 1, objective());
  }
  return model;
}

// ---------------------------------------------------------------------------
// Persistence

inline constexpr std::string_view kModelHeader = "mica-crf v1";

inline std::string serialize_model(const CrfModel& model) {
  std::string out(kModelHeader);
  out.push_back('\n');
  for (std::size_t i = 0; i < model.num_labels(); ++i) {
    if (i > 0) out.push_back(',');
    out += model.labels()[i].str();
  }
  out.push_back('\n');
  const std::size_t L = model.num_labels();
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t q = 0; q < L; ++q)
      out += "T\t" + model.labels()[p].str() + "\t" + model.labels()[q].str() + "\t" +
             detail::format_weight(model.transition(p, q)) + "\n";
  for (std::size_t f = 0; f < model.num_features(); ++f) {
    const auto& key = model.vocabulary()[f];
    if (key.find_first_of("\t\n\r") != std::string::npos)
      throw Error("feature key contains a tab or line break: " + key);
    for (std::size_t y = 0; y < L; ++y)
      out += "E\t" + key + "\t" + model.labels()[y].str() + "\t" +
             detail::format_weight(model.emission(f, y)) + "\n";
  }
  return out;
}

inline CrfModel deserialize_model(std::string_view text) {
  std::vector<std::string_view> lines = detail::split(text, '\n');
  if (text.empty()) throw ParseError(1, "empty model file");
  if (lines.back().empty()) {
    lines.pop_back();
  } else {
    throw ParseError(lines.size(), "truncated model file (no final newline)");
  }
  if (lines[0] != kModelHeader) {
    if (lines[0].rfind("mica-crf ", 0) == 0)
      throw ParseError(1, "unsupported model version '" + std::string(lines[0]) + "'");
    throw ParseError(1, "not a mica-crf model file");
  }
  if (lines.size() < 2) throw ParseError(2, "missing label line");

  std::vector<Label> labels;
  for (auto part : detail::split(lines[1], ',')) {
    auto l = Label::parse(part);
    if (!l) throw ParseError(2, "unknown label '" + std::string(part) + "'");
    labels.push_back(*l);
  }
  const std::size_t L = labels.size();
  std::map<std::size_t, std::size_t> label_pos;
  for (std::size_t i = 0; i < L; ++i)
    if (!label_pos.emplace(labels[i].code(), i).second) throw ParseError(2, "duplicate label");

  std::vector<std::optional<double>> transitions(L * L);
  std::map<std::string, std::vector<std::optional<double>>, std::less<>> emissions;
  std::map<std::string, std::size_t, std::less<>> first_seen;  // feature -> line number

  for (std::size_t i = 2; i < lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    const auto fields = detail::split(lines[i], '\t');
    if (fields.size() != 4) throw ParseError(line_no, "expected 4 tab-separated fields");
    auto weight = detail::parse_weight(fields[3]);
    if (!weight) throw ParseError(line_no, "bad weight '" + std::string(fields[3]) + "'");
    auto resolve = [&](std::string_view s) {
      auto l = Label::parse(s);
      if (!l || !label_pos.count(l->code()))
        throw ParseError(line_no, "label '" + std::string(s) + "' not in label set");
      return label_pos.at(l->code());
    };
    if (fields[0] == "T") {
      auto& slot = transitions[resolve(fields[1]) * L + resolve(fields[2])];
      if (slot) throw ParseError(line_no, "duplicate transition entry");
      slot = *weight;
    } else if (fields[0] == "E") {
      if (fields[1].empty()) throw ParseError(line_no, "empty feature key");
      auto it = emissions.find(fields[1]);
      if (it == emissions.end()) {
        it = emissions.emplace(std::string(fields[1]), std::vector<std::optional<double>>(L)).first;
        first_seen.emplace(std::string(fields[1]), line_no);
      }
      auto& slot = it->second[resolve(fields[2])];
      if (slot) throw ParseError(line_no, "duplicate emission entry");
      slot = *weight;
    } else {
      throw ParseError(line_no, "unknown record type '" + std::string(fields[0]) + "'");
    }
  }

  for (std::size_t k = 0; k < transitions.size(); ++k)
    if (!transitions[k]) throw ParseError(lines.size(), "missing transition entries (truncated file?)");
  for (const auto& [key, row] : emissions)
    for (const auto& w : row)
      if (!w) throw ParseError(first_seen.at(key), "feature '" + key + "' lacks weights for some labels");

  std::vector<std::string> vocabulary;
  vocabulary.reserve(emissions.size());
  for (const auto& entry : emissions) vocabulary.push_back(entry.first);
  CrfModel model(labels, vocabulary);
  for (std::size_t p = 0; p < L; ++p)
    for (std::size_t q = 0; q < L; ++q) model.transition(p, q) = *transitions[p * L + q];
  std::size_t f = 0;
  for (const auto& entry : emissions) {
    for (std::size_t y = 0; y < L; ++y) model.emission(f, y) = *entry.second[y];
    ++f;
  }
  return model;
}

inline void save_model(const CrfModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << serialize_model(model);
  if (!out) throw Error("failed writing " + path.string());
}

inline CrfModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const ParseError& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

}  // namespace mica

#endif  // MICA_CRF_HPP
