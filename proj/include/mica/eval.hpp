#ifndef MICA_EVAL_HPP
#define MICA_EVAL_HPP

// Entity-level exact-match scoring (CoNLL-2003 convention), micro-averaged.
//
//   precision = TP / (TP + FP)      recall   = TP / (TP + FN)
//   f1        = 2PR / (P + R)       accuracy = TP / (TP + FP + FN)
//
// Every ratio is 0 when its denominator is 0.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "mica/corpus.hpp"
#include "mica/error.hpp"

namespace mica {

struct EntityCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const { return ratio(tp, tp + fp); }
  double recall() const { return ratio(tp, tp + fn); }
  double accuracy() const { return ratio(tp, tp + fp + fn); }
  double f1() const {
    const double p = precision(), r = recall();
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  }

  EntityCounts& operator+=(const EntityCounts& o) {
    tp += o.tp, fp += o.fp, fn += o.fn;
    return *this;
  }
  friend bool operator==(const EntityCounts&, const EntityCounts&) = default;

 private:
  static double ratio(std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  }
};

struct EvalReport {
  EntityCounts overall;
  std::array<EntityCounts, kNumEntityTypes> per_type{};

  double precision() const { return overall.precision(); }
  double recall() const { return overall.recall(); }
  double f1() const { return overall.f1(); }
  double accuracy() const { return overall.accuracy(); }

  const EntityCounts& operator[](EntityType t) const { return per_type[static_cast<std::size_t>(t)]; }

  /// Adds one sentence's spans.
  void add(std::span<const EntitySpan> gold, std::span<const EntitySpan> predicted) {
    auto same = [](const EntitySpan& a, const EntitySpan& b) {
      return a.type == b.type && a.start == b.start && a.end == b.end;
    };
    for (const auto& p : predicted) {
      auto& c = per_type[static_cast<std::size_t>(p.type)];
      const bool hit = std::any_of(gold.begin(), gold.end(), [&](const auto& g) { return same(g, p); });
      (hit ? c.tp : c.fp) += 1;
      (hit ? overall.tp : overall.fp) += 1;
    }
    for (const auto& g : gold) {
      if (std::any_of(predicted.begin(), predicted.end(), [&](const auto& p) { return same(g, p); })) continue;
      per_type[static_cast<std::size_t>(g.type)].fn += 1;
      overall.fn += 1;
    }
  }
};

/// Scores the `predicted_layer` labels of `predicted` against the gold
/// labels of `gold`. Both corpora must have identical tokenization.
inline EvalReport score(const Corpus& gold, const Corpus& predicted, Layer predicted_layer) {
  auto mismatch = [](std::size_t d, std::size_t s, std::size_t t, const std::string& why) {
    return Error("token mismatch at document " + std::to_string(d) + ", sentence " + std::to_string(s) +
                 ", token " + std::to_string(t) + ": " + why);
  };
  EvalReport report;
  const std::size_t nd = std::max(gold.documents.size(), predicted.documents.size());
  for (std::size_t d = 0; d < nd; ++d) {
    if (d >= gold.documents.size() || d >= predicted.documents.size())
      throw mismatch(d, 0, 0, "document count differs");
    const auto& gd = gold.documents[d];
    const auto& pd = predicted.documents[d];
    const std::size_t ns = std::max(gd.sentences.size(), pd.sentences.size());
    for (std::size_t s = 0; s < ns; ++s) {
      if (s >= gd.sentences.size() || s >= pd.sentences.size()) throw mismatch(d, s, 0, "sentence count differs");
      const auto& gs = gd.sentences[s];
      const auto& ps = pd.sentences[s];
      const std::size_t nt = std::max(gs.size(), ps.size());
      for (std::size_t t = 0; t < nt; ++t) {
        if (t >= gs.size() || t >= ps.size()) throw mismatch(d, s, t, "sentence length differs");
        if (gs.tokens[t].surface != ps.tokens[t].surface)
          throw mismatch(d, s, t, "'" + gs.tokens[t].surface + "' vs '" + ps.tokens[t].surface + "'");
      }
      const auto gold_spans = spans_from_bio(gs, Layer::gold);
      const auto pred_spans = spans_from_bio(ps, predicted_layer);
      report.add(gold_spans, pred_spans);
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Table-style report

struct SweepRow {
  std::string model;
  std::size_t context = 0;
  EvalReport report;
};

struct SweepReport {
  std::string csv;
  std::string table;
};

inline std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

inline SweepReport sweep_report(std::span<const SweepRow> rows) {
  SweepReport out;
  out.csv = "model,context,recall,precision,f1,accuracy\n";
  for (const auto& r : rows)
    out.csv += r.model + "," + std::to_string(r.context) + "," + percent(r.report.recall()) + "," +
               percent(r.report.precision()) + "," + percent(r.report.f1()) + "," +
               percent(r.report.accuracy()) + "\n";

  std::vector<std::array<std::string, 6>> cells;
  cells.push_back({"Model", "Context", "Rec", "Prec", "F1", "Acc"});
  for (const auto& r : rows)
    cells.push_back({r.model, std::to_string(r.context), percent(r.report.recall()),
                     percent(r.report.precision()), percent(r.report.f1()), percent(r.report.accuracy())});
  std::array<std::size_t, 6> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < 6; ++c) width[c] = std::max(width[c], row[c].size());

  auto emit = [&](const std::array<std::string, 6>& row) {
    std::string line;
    for (std::size_t c = 0; c < 6; ++c) {
      if (c > 0) line += " | ";
      const std::string pad(width[c] - row[c].size(), ' ');
      // Model name left-aligned, numbers right-aligned.
      line += c == 0 ? row[c] + pad : pad + row[c];
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out.table += line + "\n";
  };
  emit(cells[0]);
  std::string rule;
  for (std::size_t c = 0; c < 6; ++c) {
    if (c > 0) rule += "-+-";
    rule += std::string(width[c], '-');
  }
  out.table += rule + "\n";
  for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
  return out;
}

}  // namespace mica

#endif  // MICA_EVAL_HPP
