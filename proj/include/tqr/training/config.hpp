#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "tqr/error.hpp"
#include "tqr/nn/adam.hpp"
#include "tqr/reader/model.hpp"

namespace tqr::training {

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
  std::size_t checkpoint_every = 0;  // 0 writes no per-epoch checkpoints
  std::string embeddings;            // GloVe file; empty selects seeded random vectors
  nn::OptimizerConfig optimizer;
  reader::ModelConfig model;

  void validate() const {
    if (epochs < 1) throw InputError("epochs must be at least 1");
    if (batch_size < 1) throw InputError("batch_size must be at least 1");
    try {
      optimizer.validate();
    } catch (const ContractViolation& e) {
      throw InputError(e.what());
    }
    model.validate();
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename V>
V parse_number(const std::string& key, const std::string& value, const std::string& where) {
  V out{};
  auto res = std::from_chars(value.data(), value.data() + value.size(), out);
  if (res.ec != std::errc() || res.ptr != value.data() + value.size()) {
    throw InputError(where + ": '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

inline std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

using Setter = std::function<void(TrainConfig&, const std::string&, const std::string&)>;

inline const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"epochs", [](TrainConfig& c, const std::string& v, const std::string& w) { c.epochs = parse_number<std::size_t>("epochs", v, w); }},
      {"batch_size", [](TrainConfig& c, const std::string& v, const std::string& w) { c.batch_size = parse_number<std::size_t>("batch_size", v, w); }},
      {"seed", [](TrainConfig& c, const std::string& v, const std::string& w) { c.seed = parse_number<std::uint64_t>("seed", v, w); }},
      {"checkpoint_every", [](TrainConfig& c, const std::string& v, const std::string& w) { c.checkpoint_every = parse_number<std::size_t>("checkpoint_every", v, w); }},
      {"embeddings", [](TrainConfig& c, const std::string& v, const std::string&) { c.embeddings = v; }},
      {"learning_rate", [](TrainConfig& c, const std::string& v, const std::string& w) { c.optimizer.learning_rate = parse_number<double>("learning_rate", v, w); }},
      {"beta1", [](TrainConfig& c, const std::string& v, const std::string& w) { c.optimizer.beta1 = parse_number<double>("beta1", v, w); }},
      {"beta2", [](TrainConfig& c, const std::string& v, const std::string& w) { c.optimizer.beta2 = parse_number<double>("beta2", v, w); }},
      {"epsilon", [](TrainConfig& c, const std::string& v, const std::string& w) { c.optimizer.epsilon = parse_number<double>("epsilon", v, w); }},
      {"gradient_clip_norm",
       [](TrainConfig& c, const std::string& v, const std::string& w) {
         if (v == "none") c.optimizer.gradient_clip_norm.reset();
         else c.optimizer.gradient_clip_norm = parse_number<double>("gradient_clip_norm", v, w);
       }},
      {"embedding_dim", [](TrainConfig& c, const std::string& v, const std::string& w) { c.model.embedding_dim = parse_number<std::size_t>("embedding_dim", v, w); }},
      {"hidden_size", [](TrainConfig& c, const std::string& v, const std::string& w) { c.model.hidden_size = parse_number<std::size_t>("hidden_size", v, w); }},
      {"max_span_len", [](TrainConfig& c, const std::string& v, const std::string& w) { c.model.max_span_len = parse_number<std::size_t>("max_span_len", v, w); }},
      {"dropout", [](TrainConfig& c, const std::string& v, const std::string& w) { c.model.dropout = parse_number<double>("dropout", v, w); }},
      {"features",
       [](TrainConfig& c, const std::string& v, const std::string& w) {
         try {
           c.model.features = reader::parse_feature_mask(v);
         } catch (const InputError& e) {
           throw InputError(w + ": " + e.what());
         }
       }},
  };
  return table;
}

}  // namespace detail

// Flat "key = value" text; '#' starts a comment. Unknown keys are errors.
inline TrainConfig parse_config(std::string_view text, const std::string& origin = "config") {
  TrainConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = detail::trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) throw InputError(where + ": expected key = value");
    std::string key = detail::trim(body.substr(0, eq));
    std::string value = detail::trim(body.substr(eq + 1));
    auto it = detail::setters().find(key);
    if (it == detail::setters().end()) throw InputError(where + ": unknown config key '" + key + "'");
    it->second(cfg, value, where);
  }
  cfg.validate();
  return cfg;
}

inline std::string dump_config(const TrainConfig& c) {
  std::ostringstream out;
  out << "epochs = " << c.epochs << '\n'
      << "batch_size = " << c.batch_size << '\n'
      << "seed = " << c.seed << '\n'
      << "learning_rate = " << detail::shortest(c.optimizer.learning_rate) << '\n'
      << "beta1 = " << detail::shortest(c.optimizer.beta1) << '\n'
      << "beta2 = " << detail::shortest(c.optimizer.beta2) << '\n'
      << "epsilon = " << detail::shortest(c.optimizer.epsilon) << '\n'
      << "gradient_clip_norm = "
      << (c.optimizer.gradient_clip_norm ? detail::shortest(*c.optimizer.gradient_clip_norm) : std::string("none")) << '\n'
      << "embedding_dim = " << c.model.embedding_dim << '\n'
      << "hidden_size = " << c.model.hidden_size << '\n'
      << "max_span_len = " << c.model.max_span_len << '\n'
      << "features = " << reader::to_string(c.model.features) << '\n'
      << "dropout = " << detail::shortest(c.model.dropout) << '\n'
      << "checkpoint_every = " << c.checkpoint_every << '\n'
      << "embeddings = " << c.embeddings << '\n';
  return out.str();
}

}  // namespace tqr::training
