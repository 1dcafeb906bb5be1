#pragma once

// Independent reference implementations used to check the library. They
// work on plain std::vector<double> with scalar loops and share no code
// with the tape or the Eigen kernels.

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<Vec>;  // row-major, rows of equal length

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec matvec(const Mat& m, const Vec& v) {
  Vec out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

struct Gru {
  Mat Wz, Wr, Wh, Uz, Ur, Uh;
  Vec bz, br, bh;
};

// z = σ(Wz x + Uz h + bz); r = σ(Wr x + Ur h + br);
// h~ = tanh(Wh x + r ⊙ (Uh h + bh)); h' = (1 − z) ⊙ h + z ⊙ h~
inline Vec gru_step(const Vec& x, const Vec& h, const Gru& p) {
  const std::size_t H = h.size();
  Vec wzx = matvec(p.Wz, x), uzh = matvec(p.Uz, h);
  Vec wrx = matvec(p.Wr, x), urh = matvec(p.Ur, h);
  Vec whx = matvec(p.Wh, x), uhh = matvec(p.Uh, h);
  Vec out(H);
  for (std::size_t i = 0; i < H; ++i) {
    double z = sigmoid(wzx[i] + uzh[i] + p.bz[i]);
    double r = sigmoid(wrx[i] + urh[i] + p.br[i]);
    double cand = std::tanh(whx[i] + r * (uhh[i] + p.bh[i]));
    out[i] = (1.0 - z) * h[i] + z * cand;
  }
  return out;
}

// States over the real positions only; padding simply stops the loop.
inline std::vector<Vec> encode(const std::vector<Vec>& xs, const Gru& p) {
  std::vector<Vec> hs;
  Vec h(p.bz.size(), 0.0);
  for (const auto& x : xs) {
    h = gru_step(x, h, p);
    hs.push_back(h);
  }
  return hs;
}

struct Attention {
  Mat W;
  Vec b, c;
};

struct Pooled {
  Vec rep;
  Vec alpha;
};

// u_t = tanh(W h_t + b); α = softmax_t(u_t · c); rep = Σ α_t h_t
inline Pooled attend(const std::vector<Vec>& hs, const Attention& a) {
  Vec scores;
  for (const auto& h : hs) {
    Vec u = matvec(a.W, h);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += std::tanh(u[i] + a.b[i]) * a.c[i];
    scores.push_back(s);
  }
  double mx = scores[0];
  for (double s : scores) mx = std::max(mx, s);
  double total = 0.0;
  Vec alpha;
  for (double s : scores) {
    alpha.push_back(std::exp(s - mx));
    total += alpha.back();
  }
  for (auto& v : alpha) v /= total;
  Vec rep(hs[0].size(), 0.0);
  for (std::size_t t = 0; t < hs.size(); ++t) {
    for (std::size_t i = 0; i < rep.size(); ++i) rep[i] += alpha[t] * hs[t][i];
  }
  return {rep, alpha};
}

inline double output(const Vec& w, double b, const Vec& rep) {
  double s = b;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * rep[i];
  return sigmoid(s);
}

// Krippendorff's alpha, nominal, by explicit enumeration of ordered value
// pairs within each unit: D_o averages within-unit disagreement, D_e the
// disagreement between all pairable values regardless of unit.
inline double alpha_by_pairs(const std::vector<std::vector<int>>& units) {
  std::vector<int> pooled;
  double within = 0.0;
  for (const auto& u : units) {
    if (u.size() < 2) continue;
    double d = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      for (std::size_t j = 0; j < u.size(); ++j) {
        if (i != j && u[i] != u[j]) d += 1.0;
      }
    }
    within += d / static_cast<double>(u.size() - 1);
    pooled.insert(pooled.end(), u.begin(), u.end());
  }
  const double n = static_cast<double>(pooled.size());
  double between = 0.0;
  for (std::size_t i = 0; i < pooled.size(); ++i) {
    for (std::size_t j = 0; j < pooled.size(); ++j) {
      if (i != j && pooled[i] != pooled[j]) between += 1.0;
    }
  }
  const double d_o = within / n;
  const double d_e = between / (n * (n - 1.0));
  return 1.0 - d_o / d_e;
}

struct Tally {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// pred/gold: true = biased
inline Tally tally(const std::vector<bool>& pred, const std::vector<bool>& gold) {
  Tally t;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i] && gold[i]) t.tp++;
    if (pred[i] && !gold[i]) t.fp++;
    if (!pred[i] && !gold[i]) t.tn++;
    if (!pred[i] && gold[i]) t.fn++;
  }
  return t;
}

}  // namespace oracle
