#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>

#include "tqr/error.hpp"

namespace tqr::reader {

enum class DecodeMode { raw_argmax, constrained };

inline std::string_view to_string(DecodeMode m) { return m == DecodeMode::raw_argmax ? "raw" : "constrained"; }

inline DecodeMode parse_decode_mode(std::string_view s) {
  if (s == "raw" || s == "raw_argmax") return DecodeMode::raw_argmax;
  if (s == "constrained") return DecodeMode::constrained;
  throw InputError("unknown decode mode '" + std::string(s) + "' (expected raw or constrained)");
}

struct SpanPrediction {
  std::size_t start = 0;
  std::size_t end = 0;
  double start_prob = 0.0;
  double end_prob = 0.0;
  DecodeMode mode = DecodeMode::raw_argmax;
};

// First index of the maximum.
template <typename T>
std::size_t argmax(std::span<const T> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// Raw mode takes independent argmaxes and may return end < start.
// Constrained mode maximizes P_start(i) * P_end(j) over i <= j <= i + max_span_len,
// ties going to the smallest i and then the smallest j.
template <typename T>
SpanPrediction decode_span(std::span<const T> p_start, std::span<const T> p_end, DecodeMode mode,
                           std::size_t max_span_len = 15) {
  if (p_start.empty() || p_start.size() != p_end.size()) {
    throw ContractViolation("decode_span: distributions of length " + std::to_string(p_start.size()) + " and " +
                            std::to_string(p_end.size()));
  }
  SpanPrediction out;
  out.mode = mode;
  if (mode == DecodeMode::raw_argmax) {
    out.start = argmax(p_start);
    out.end = argmax(p_end);
  } else {
    const std::size_t m = p_start.size();
    double best = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t last = std::min(m - 1, i + max_span_len);
      for (std::size_t j = i; j <= last; ++j) {
        double score = static_cast<double>(p_start[i]) * static_cast<double>(p_end[j]);
        if (score > best) {
          best = score;
          out.start = i;
          out.end = j;
        }
      }
    }
  }
  out.start_prob = static_cast<double>(p_start[out.start]);
  out.end_prob = static_cast<double>(p_end[out.end]);
  return out;
}

}  // namespace tqr::reader
