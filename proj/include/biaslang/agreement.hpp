#pragma once

#include <array>
#include <cstddef>

#include "biaslang/corpus.hpp"
#include "biaslang/error.hpp"

namespace biaslang {

// Krippendorff's alpha, nominal metric, via the coincidence matrix.
// Items rated once carry no pairable values and are skipped; missing
// (worker, item) cells are simply absent.
inline double krippendorff_alpha(const JudgmentTable& table) {
  constexpr std::size_t kValues = 3;
  std::array<std::array<double, kValues>, kValues> coincidence{};
  for (const auto& item : table.items) {
    auto rs = table.ratings_for(item);
    if (rs.size() < 2) continue;
    std::array<double, kValues> count{};
    for (auto r : rs) count[static_cast<std::size_t>(r)] += 1.0;
    const double denom = static_cast<double>(rs.size()) - 1.0;
    for (std::size_t c = 0; c < kValues; ++c) {
      for (std::size_t k = 0; k < kValues; ++k) {
        coincidence[c][k] += count[c] * (count[k] - (c == k ? 1.0 : 0.0)) / denom;
      }
    }
  }

  std::array<double, kValues> marginal{};
  double n = 0.0;
  for (std::size_t c = 0; c < kValues; ++c) {
    for (std::size_t k = 0; k < kValues; ++k) marginal[c] += coincidence[c][k];
    n += marginal[c];
  }
  if (n < 2.0) throw AgreementUndefined("need at least two pairable ratings");

  double observed = 0.0, expected = 0.0;
  for (std::size_t c = 0; c < kValues; ++c) {
    for (std::size_t k = 0; k < kValues; ++k) {
      if (c == k) continue;
      observed += coincidence[c][k];
      expected += marginal[c] * marginal[k];
    }
  }
  if (observed == 0.0) return 1.0;
  return 1.0 - (n - 1.0) * observed / expected;
}

}  // namespace biaslang
