#pragma once

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tqr/error.hpp"
#include "tqr/nn/parameter_store.hpp"
#include "tqr/reader/decode.hpp"
#include "tqr/reader/model.hpp"

namespace tqr::evaluation {

// Percentages in [0, 100].
struct MetricsReport {
  double start_acc = 0.0;
  double end_acc = 0.0;
  double mean = 0.0;
  double exact_match = 0.0;
  std::size_t n_examples = 0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

struct GoldSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

inline MetricsReport score_predictions(const std::vector<reader::SpanPrediction>& predictions,
                                       const std::vector<GoldSpan>& golds) {
  if (predictions.empty()) throw InputError("evaluation needs at least one example");
  if (predictions.size() != golds.size()) {
    throw ContractViolation("score_predictions: " + std::to_string(predictions.size()) + " predictions for " +
                            std::to_string(golds.size()) + " gold spans");
  }
  std::size_t starts = 0, ends = 0, exact = 0;
  for (std::size_t i = 0; i < golds.size(); ++i) {
    bool s = predictions[i].start == golds[i].start;
    bool e = predictions[i].end == golds[i].end;
    starts += s;
    ends += e;
    exact += s && e;
  }
  const double n = static_cast<double>(golds.size());
  MetricsReport r;
  r.n_examples = golds.size();
  r.start_acc = 100.0 * static_cast<double>(starts) / n;
  r.end_acc = 100.0 * static_cast<double>(ends) / n;
  r.mean = (r.start_acc + r.end_acc) / 2.0;
  r.exact_match = 100.0 * static_cast<double>(exact) / n;
  return r;
}

// Worker count: TQR_THREADS when set to a positive integer, otherwise the
// hardware concurrency.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("TQR_THREADS")) {
    std::size_t v = 0;
    std::string_view s(env);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec == std::errc() && res.ptr == s.data() + s.size() && v > 0) return v;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

// Decodes every example, in parallel over a read-only parameter snapshot.
inline std::vector<reader::SpanPrediction> predict_all(const std::vector<reader::ExampleInputs>& examples,
                                                       const nn::ParameterStore<float>& params,
                                                       const reader::ModelConfig& cfg, reader::DecodeMode mode) {
  std::vector<reader::SpanPrediction> out(examples.size());
  const std::size_t workers = std::min(worker_count(), std::max<std::size_t>(1, examples.size()));
  auto run = [&](std::size_t w) {
    for (std::size_t i = w; i < examples.size(); i += workers) out[i] = reader::predict(params, examples[i], cfg, mode).span;
  };
  if (workers <= 1) {
    run(0);
    return out;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        run(w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

inline MetricsReport evaluate(const std::vector<reader::ExampleInputs>& examples, const nn::ParameterStore<float>& params,
                              const reader::ModelConfig& cfg, reader::DecodeMode mode = reader::DecodeMode::raw_argmax) {
  if (examples.empty()) throw InputError("evaluation needs at least one example");
  auto predictions = predict_all(examples, params, cfg, mode);
  std::vector<GoldSpan> golds;
  golds.reserve(examples.size());
  for (const auto& ex : examples) golds.push_back({ex.gold_start, ex.gold_end});
  return score_predictions(predictions, golds);
}

// Shortest representation that reads back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string format_fixed(double v, int digits) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, digits);
  return std::string(buf, res.ptr);
}

inline std::string pad(std::string s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  return left ? s + std::string(width - s.size(), ' ') : std::string(width - s.size(), ' ') + s;
}

// Aligned plain-text table; rows are (label, report).
inline std::string format_table(const std::vector<std::pair<std::string, MetricsReport>>& rows,
                                const std::string& label_header = "run") {
  std::size_t w = label_header.size();
  for (const auto& [label, _] : rows) w = std::max(w, label.size());
  std::string out = pad(label_header, w, true) + "  " + pad("start_acc", 9) + "  " + pad("end_acc", 9) + "  " +
                    pad("mean", 9) + "  " + pad("exact", 9) + "  " + pad("n", 6) + "\n";
  for (const auto& [label, r] : rows) {
    out += pad(label, w, true) + "  " + pad(format_fixed(r.start_acc, 2), 9) + "  " + pad(format_fixed(r.end_acc, 2), 9) +
           "  " + pad(format_fixed(r.mean, 2), 9) + "  " + pad(format_fixed(r.exact_match, 2), 9) + "  " +
           pad(std::to_string(r.n_examples), 6) + "\n";
  }
  return out;
}

inline std::string csv_header(const std::string& label_header) {
  return label_header + ",start_acc,end_acc,mean,exact_match,n\n";
}

inline std::string csv_row(const std::string& label, const MetricsReport& r) {
  return label + "," + format_number(r.start_acc) + "," + format_number(r.end_acc) + "," + format_number(r.mean) + "," +
         format_number(r.exact_match) + "," + std::to_string(r.n_examples) + "\n";
}

}  // namespace tqr::evaluation
