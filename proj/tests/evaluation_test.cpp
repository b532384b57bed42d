#include <gtest/gtest.h>

#include <cstdlib>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "support.hpp"
#include "tqr/corpus/synthetic.hpp"
#include "tqr/evaluation/ablation.hpp"
#include "tqr/evaluation/metrics.hpp"
#include "tqr/training/model_io.hpp"

using namespace tqr;
using namespace tqr::evaluation;
using reader::DecodeMode;
using reader::SpanPrediction;

namespace {

SpanPrediction span(std::size_t s, std::size_t e) {
  SpanPrediction p;
  p.start = s;
  p.end = e;
  return p;
}

void expect_invariants(const MetricsReport& r) {
  EXPECT_LE(r.exact_match, std::min(r.start_acc, r.end_acc));
  EXPECT_EQ(r.mean, (r.start_acc + r.end_acc) / 2);
  for (double v : {r.start_acc, r.end_acc, r.exact_match}) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 100.0);
  }
}

class ThreadsEnv {
 public:
  explicit ThreadsEnv(const char* value) {
    if (const char* old = std::getenv("TQR_THREADS")) previous_ = old;
    ::setenv("TQR_THREADS", value, 1);
  }
  ~ThreadsEnv() {
    if (previous_) ::setenv("TQR_THREADS", previous_->c_str(), 1);
    else ::unsetenv("TQR_THREADS");
  }

 private:
  std::optional<std::string> previous_;
};

}  // namespace

TEST(Metrics, HandFixture) {
  auto r = score_predictions({span(0, 7), span(0, 7), span(0, 3), span(0, 3)}, {{0, 7}, {1, 7}, {0, 3}, {1, 1}});
  EXPECT_EQ(r.start_acc, 50.0);
  EXPECT_EQ(r.end_acc, 75.0);
  EXPECT_EQ(r.mean, 62.5);
  EXPECT_EQ(r.exact_match, 50.0);
  EXPECT_EQ(r.n_examples, 4u);
}

TEST(Metrics, FixtureModelReproducesHandFixture) {
  auto examples = test::fixture_examples();
  auto model = test::fixture_model(examples);
  auto inputs = training::prepare_inputs(examples, model.embeddings, model.df);
  for (auto mode : {DecodeMode::raw_argmax, DecodeMode::constrained}) {
    auto r = evaluate(inputs, model.params, model.config, mode);
    EXPECT_EQ(r, (MetricsReport{50, 75, 62.5, 50, 4})) << to_string(mode);
  }
}

TEST(Metrics, AllCorrect) {
  auto r = score_predictions({span(2, 3), span(0, 0)}, {{2, 3}, {0, 0}});
  EXPECT_EQ(r, (MetricsReport{100, 100, 100, 100, 2}));
}

TEST(Metrics, ExactNeedsBothEnds) {
  auto r = score_predictions({span(2, 5), span(1, 3)}, {{2, 3}, {0, 3}});
  EXPECT_EQ(r.start_acc, 50.0);
  EXPECT_EQ(r.end_acc, 50.0);
  EXPECT_EQ(r.exact_match, 0.0);
}

TEST(Metrics, EmptySetIsAnError) {
  EXPECT_THROW(score_predictions({}, {}), InputError);
  EXPECT_THROW(score_predictions({span(0, 0)}, {}), ContractViolation);
}

TEST(Metrics, InvariantsOnRandomPredictions) {
  nn::Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng.below(30), m = 1 + rng.below(6);
    std::vector<SpanPrediction> preds;
    std::vector<GoldSpan> golds;
    for (std::size_t i = 0; i < n; ++i) {
      preds.push_back(span(rng.below(m), rng.below(m)));
      golds.push_back({rng.below(m), rng.below(m)});
    }
    expect_invariants(score_predictions(preds, golds));
  }
}

TEST(Metrics, EvaluationIsPureAndThreadIndependent) {
  auto examples = corpus::generate_synthetic(8, 2);
  auto cfg = test::small_train_config();
  auto table = reader::EmbeddingTable::random(training::vocabulary({&examples}), cfg.model.embedding_dim, 1);
  auto inputs = training::prepare_inputs(examples, table, corpus::document_frequency(examples));
  auto params = reader::init_params<float>(cfg.model, 3);
  const auto snapshot = params;
  std::vector<std::vector<SpanPrediction>> runs;
  for (const char* threads : {"1", "3", "8"}) {
    ThreadsEnv env(threads);
    EXPECT_EQ(worker_count(), static_cast<std::size_t>(std::atoi(threads)));
    runs.push_back(predict_all(inputs, params, cfg.model, DecodeMode::constrained));
  }
  EXPECT_TRUE(params.same_values(snapshot));
  for (std::size_t r = 1; r < runs.size(); ++r) {
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      EXPECT_EQ(runs[r][i].start, runs[0][i].start);
      EXPECT_EQ(runs[r][i].end, runs[0][i].end);
      EXPECT_EQ(runs[r][i].start_prob, runs[0][i].start_prob);
    }
  }
  for (const auto& p : runs[0]) EXPECT_LE(p.start, p.end);
}

TEST(Metrics, BadThreadSettingFallsBack) {
  ThreadsEnv env("zero");
  EXPECT_GE(worker_count(), 1u);
}

TEST(Formatting, TableAndCsv) {
  MetricsReport r{50, 75, 62.5, 50, 4};
  EXPECT_EQ(csv_header("split") + csv_row("dev", r), "split,start_acc,end_acc,mean,exact_match,n\ndev,50,75,62.5,50,4\n");
  auto table = format_table({{"dev", r}});
  EXPECT_NE(table.find("62.50"), std::string::npos);
  EXPECT_EQ(format_fixed(2.0 / 3.0 * 100, 2), "66.67");
}

TEST(Ablation, PresetRows) {
  auto specs = preset_specs();
  ASSERT_EQ(specs.size(), 10u);
  EXPECT_EQ(specs[0].name, "Full");
  EXPECT_EQ(specs[0].mask, reader::FeatureMask::all());
  auto token = std::find_if(specs.begin(), specs.end(), [](const auto& s) { return s.name == "No f_token"; });
  ASSERT_NE(token, specs.end());
  EXPECT_FALSE(token->mask.use_pos || token->mask.use_ner || token->mask.use_tfidf);
  EXPECT_TRUE(token->mask.use_aligned && token->mask.use_exact_match);
  std::set<std::string> masks;
  for (const auto& s : specs) masks.insert(reader::to_string(s.mask));
  EXPECT_EQ(masks.size(), 10u);
  EXPECT_NO_THROW(check_unique_names(specs));
}

TEST(Ablation, SpecFileRoundTrip) {
  auto specs = preset_specs();
  EXPECT_EQ(parse_specs(format_specs(specs)), specs);
  auto custom = parse_specs("# name\tgroups\nonly pos\tpos\nnothing\tnone\n");
  ASSERT_EQ(custom.size(), 2u);
  EXPECT_TRUE(custom[0].mask.use_pos);
  EXPECT_FALSE(custom[0].mask.use_ner);
}

TEST(Ablation, SpecFileErrors) {
  auto message = [](std::string_view text) -> std::string {
    try {
      parse_specs(text, "a.tsv");
    } catch (const InputError& e) {
      return e.what();
    }
    return "";
  };
  EXPECT_EQ(message("Full\tall\nFull\tnone\n"), "duplicate ablation spec name 'Full'");
  EXPECT_EQ(message("Full all\n"), "a.tsv:1: expected name<TAB>feature groups");
  EXPECT_NE(message("x\tsyntax\n").find("a.tsv:1"), std::string::npos);
  EXPECT_EQ(message(""), "ablation needs at least one spec");
}

// Features are redundant on the synthetic set, so every masked model still
// fits the training split.
TEST(Ablation, EveryPresetFitsSyntheticData) {
  auto cfg = test::small_train_config(20);
  corpus::DatasetSplit split;
  split.train = corpus::generate_synthetic(20, 7);
  auto data = training::prepare_data(split, cfg);
  std::vector<std::string> seen;
  auto results = run_ablation(data, cfg, preset_specs(), [&](const AblationResult& r) { seen.push_back(r.spec.name); });
  ASSERT_EQ(results.size(), 10u);
  EXPECT_EQ(seen.size(), 10u);
  for (const auto& r : results) {
    EXPECT_EQ(r.report.n_examples, 60u);
    EXPECT_GE(r.report.exact_match, 80.0) << r.spec.name;
    expect_invariants(r.report);
  }
  auto csv = ablation_csv(results);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 11);
  EXPECT_NE(format_ablation_table(results).find("No f_aligned and NER"), std::string::npos);
}
