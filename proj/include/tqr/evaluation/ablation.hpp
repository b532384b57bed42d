#pragma once

#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tqr/corpus/types.hpp"
#include "tqr/error.hpp"
#include "tqr/evaluation/metrics.hpp"
#include "tqr/reader/features.hpp"
#include "tqr/training/model_io.hpp"
#include "tqr/training/train.hpp"

namespace tqr::evaluation {

struct AblationSpec {
  std::string name;
  reader::FeatureMask mask;

  friend bool operator==(const AblationSpec&, const AblationSpec&) = default;
};

// The ten feature-ablation rows: the full model, single removals, the joint
// removal of the token features, and three pairwise removals.
inline std::vector<AblationSpec> preset_specs() {
  using reader::FeatureMask;
  auto without = [](auto edit) {
    FeatureMask m = FeatureMask::all();
    edit(m);
    return m;
  };
  return {
      {"Full", FeatureMask::all()},
      {"No NER", without([](FeatureMask& m) { m.use_ner = false; })},
      {"No POS", without([](FeatureMask& m) { m.use_pos = false; })},
      {"No TF-IDF", without([](FeatureMask& m) { m.use_tfidf = false; })},
      {"No f_token", without([](FeatureMask& m) { m.use_pos = m.use_ner = m.use_tfidf = false; })},
      {"No f_aligned", without([](FeatureMask& m) { m.use_aligned = false; })},
      {"No f_exact_match", without([](FeatureMask& m) { m.use_exact_match = false; })},
      {"No f_aligned and f_exact_match", without([](FeatureMask& m) { m.use_aligned = m.use_exact_match = false; })},
      {"No f_aligned and NER", without([](FeatureMask& m) { m.use_aligned = m.use_ner = false; })},
      {"No f_exact_match and NER", without([](FeatureMask& m) { m.use_exact_match = m.use_ner = false; })},
  };
}

inline void check_unique_names(const std::vector<AblationSpec>& specs) {
  if (specs.empty()) throw InputError("ablation needs at least one spec");
  std::set<std::string> seen;
  for (const auto& s : specs) {
    if (s.name.empty()) throw InputError("ablation spec with an empty name");
    if (!seen.insert(s.name).second) throw InputError("duplicate ablation spec name '" + s.name + "'");
  }
}

// One spec per line: name<TAB>enabled groups (comma list, "all", or "none").
inline std::vector<AblationSpec> parse_specs(std::string_view text, const std::string& origin = "specs") {
  std::vector<AblationSpec> specs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw InputError(where + ": expected name<TAB>feature groups");
    try {
      specs.push_back({line.substr(0, tab), reader::parse_feature_mask(line.substr(tab + 1))});
    } catch (const InputError& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  check_unique_names(specs);
  return specs;
}

inline std::string format_specs(const std::vector<AblationSpec>& specs) {
  std::string out;
  for (const auto& s : specs) out += s.name + "\t" + reader::to_string(s.mask) + "\n";
  return out;
}

struct AblationResult {
  AblationSpec spec;
  MetricsReport report;
  std::vector<training::EpochLog> log;
};

// One train + evaluate cycle per spec with identical seed and data. Scores
// the selected parameters on dev, or on train when dev is empty.
inline std::vector<AblationResult> run_ablation(const training::PreparedData& data, const training::TrainConfig& base,
                                                const std::vector<AblationSpec>& specs,
                                                const std::function<void(const AblationResult&)>& on_result = {}) {
  check_unique_names(specs);
  const auto& eval_set = data.dev.empty() ? data.train : data.dev;
  std::vector<AblationResult> out;
  for (const auto& spec : specs) {
    training::TrainConfig cfg = base;
    cfg.model.features = spec.mask;
    auto run = training::train(data.train, data.dev, cfg);
    AblationResult r{spec, evaluate(eval_set, run.best_params, cfg.model), std::move(run.log)};
    if (on_result) on_result(r);
    out.push_back(std::move(r));
  }
  return out;
}

// Feature rows with the f-measure column (exact match) first.
inline std::string format_ablation_table(const std::vector<AblationResult>& results) {
  std::size_t w = std::string("Features").size();
  for (const auto& r : results) w = std::max(w, r.spec.name.size());
  std::string out = pad("Features", w, true) + "  " + pad("F-measure", 9) + "  " + pad("start_acc", 9) + "  " +
                    pad("end_acc", 9) + "  " + pad("mean", 9) + "  " + pad("n", 6) + "\n";
  for (const auto& r : results) {
    out += pad(r.spec.name, w, true) + "  " + pad(format_fixed(r.report.exact_match, 2), 9) + "  " +
           pad(format_fixed(r.report.start_acc, 2), 9) + "  " + pad(format_fixed(r.report.end_acc, 2), 9) + "  " +
           pad(format_fixed(r.report.mean, 2), 9) + "  " + pad(std::to_string(r.report.n_examples), 6) + "\n";
  }
  return out;
}

inline std::string ablation_csv(const std::vector<AblationResult>& results) {
  std::string out = csv_header("spec_name");
  for (const auto& r : results) out += csv_row(r.spec.name, r.report);
  return out;
}

}  // namespace tqr::evaluation
