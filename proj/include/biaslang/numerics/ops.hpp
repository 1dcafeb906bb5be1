#pragma once

// Differentiable primitives. Every op validates shapes, computes its value,
// and records a backward closure on the tape of its inputs.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "biaslang/numerics/tape.hpp"

namespace biaslang::ad {

namespace kernel {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMut = Eigen::Map<RowMajor>;
using Map = Eigen::Map<const RowMajor>;

inline Map view(const Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}
inline MapMut view(Tensor& t) {
  return {t.data(), static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(t.cols())};
}

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace kernel

namespace detail {

[[noreturn]] inline void shape_mismatch(const char* op, const Shape& a, const Shape& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_string(a) + " and " + shape_string(b));
}

inline void require_matrix(const char* op, const Tensor& t) {
  if (t.rank() != 2) throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_string(t.shape()));
}

inline Tape& tape_of(const Var& a) {
  if (!a.tape) throw StateError("unbound Var");
  return *a.tape;
}

}  // namespace detail

// A (m×k) · B (k×n)
inline Var matmul(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  detail::require_matrix("matmul", A);
  detail::require_matrix("matmul", B);
  if (A.cols() != B.rows()) detail::shape_mismatch("matmul", A.shape(), B.shape());
  Tensor out = Tensor::matrix(A.rows(), B.cols());
  kernel::view(out).noalias() = kernel::view(A) * kernel::view(B);
  return detail::tape_of(a).record("matmul", std::move(out), {a, b}, [a, b](Tape& t, std::size_t self) {
    auto G = kernel::view(t.grad(self));
    if (t.needs_grad(a.id)) kernel::view(t.grad_buffer(a.id)).noalias() += G * kernel::view(t.value(b.id)).transpose();
    if (t.needs_grad(b.id)) kernel::view(t.grad_buffer(b.id)).noalias() += kernel::view(t.value(a.id)).transpose() * G;
  });
}

// A (m×k) · Bᵀ where B is (n×k); the layout of weight matrices stored as
// output × input.
inline Var matmul_bt(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  detail::require_matrix("matmul_bt", A);
  detail::require_matrix("matmul_bt", B);
  if (A.cols() != B.cols()) detail::shape_mismatch("matmul_bt", A.shape(), B.shape());
  Tensor out = Tensor::matrix(A.rows(), B.rows());
  kernel::view(out).noalias() = kernel::view(A) * kernel::view(B).transpose();
  return detail::tape_of(a).record("matmul_bt", std::move(out), {a, b}, [a, b](Tape& t, std::size_t self) {
    auto G = kernel::view(t.grad(self));
    if (t.needs_grad(a.id)) kernel::view(t.grad_buffer(a.id)).noalias() += G * kernel::view(t.value(b.id));
    if (t.needs_grad(b.id)) kernel::view(t.grad_buffer(b.id)).noalias() += G.transpose() * kernel::view(t.value(a.id));
  });
}

// A (m×k) · v (k) -> m×1
inline Var matvec(Var a, Var v) {
  const Tensor& A = a.value();
  const Tensor& x = v.value();
  detail::require_matrix("matvec", A);
  if (x.rank() != 1 || x.size() != A.cols()) detail::shape_mismatch("matvec", A.shape(), x.shape());
  Tensor out = Tensor::matrix(A.rows(), 1);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd> ov(out.data(), static_cast<Eigen::Index>(out.size()));
  ov.noalias() = kernel::view(A) * xv;
  return detail::tape_of(a).record("matvec", std::move(out), {a, v}, [a, v](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Eigen::Map<const Eigen::VectorXd> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    if (t.needs_grad(a.id)) {
      const Tensor& x = t.value(v.id);
      Eigen::Map<const Eigen::RowVectorXd> xr(x.data(), static_cast<Eigen::Index>(x.size()));
      kernel::view(t.grad_buffer(a.id)).noalias() += gv * xr;
    }
    if (t.needs_grad(v.id)) {
      Tensor& gx = t.grad_buffer(v.id);
      Eigen::Map<Eigen::VectorXd> gxv(gx.data(), static_cast<Eigen::Index>(gx.size()));
      gxv.noalias() += kernel::view(t.value(a.id)).transpose() * gv;
    }
  });
}

// Elementwise sum of equal shapes, or matrix + rank-1 bias added to every row.
inline Var add(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  const bool row_bias = A.rank() == 2 && B.rank() == 1 && B.size() == A.cols();
  if (!row_bias && A.shape() != B.shape()) detail::shape_mismatch("add", A.shape(), B.shape());
  Tensor out = A;
  if (row_bias) {
    const std::size_t cols = A.cols();
    for (std::size_t r = 0; r < A.rows(); ++r) {
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] += B[c];
    }
  } else {
    out += B;
  }
  return detail::tape_of(a).record("add", std::move(out), {a, b}, [a, b, row_bias](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(a.id)) t.grad_buffer(a.id) += g;
    if (t.needs_grad(b.id)) {
      Tensor& gb = t.grad_buffer(b.id);
      if (row_bias) {
        const std::size_t cols = g.cols();
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < cols; ++c) gb[c] += g[r * cols + c];
        }
      } else {
        gb += g;
      }
    }
  });
}

inline Var sub(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) detail::shape_mismatch("sub", A.shape(), B.shape());
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= B[i];
  return detail::tape_of(a).record("sub", std::move(out), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(a.id)) t.grad_buffer(a.id) += g;
    if (t.needs_grad(b.id)) {
      Tensor& gb = t.grad_buffer(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
    }
  });
}

inline Var hadamard(Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  if (A.shape() != B.shape()) detail::shape_mismatch("hadamard", A.shape(), B.shape());
  Tensor out = A;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= B[i];
  return detail::tape_of(a).record("hadamard", std::move(out), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    if (t.needs_grad(a.id)) {
      Tensor& ga = t.grad_buffer(a.id);
      const Tensor& B = t.value(b.id);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * B[i];
    }
    if (t.needs_grad(b.id)) {
      Tensor& gb = t.grad_buffer(b.id);
      const Tensor& A = t.value(a.id);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * A[i];
    }
  });
}

// 1 - a
inline Var one_minus(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = 1.0 - v;
  return detail::tape_of(a).record("one_minus", std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] -= g[i];
  });
}

inline Var tanh(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = std::tanh(v);
  return detail::tape_of(a).record("tanh", std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

inline Var sigmoid(Var a) {
  Tensor out = a.value();
  for (auto& v : out.values()) v = kernel::sigmoid(v);
  return detail::tape_of(a).record("sigmoid", std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(a.id);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * y[i] * (1.0 - y[i]);
  });
}

inline constexpr double kMaskedScore = -1e30;

// Softmax over the last axis (each row of a matrix, or a whole vector).
// Entries whose mask byte is 0 get kMaskedScore added before
// exponentiation and therefore come out exactly 0.
inline Var softmax(Var a, std::span<const std::uint8_t> mask = {}) {
  const Tensor& A = a.value();
  if (A.rank() != 1 && A.rank() != 2) throw ShapeError("softmax: expected rank 1 or 2, got " + shape_string(A.shape()));
  if (!mask.empty() && mask.size() != A.size()) {
    throw ShapeError("softmax: mask of length " + std::to_string(mask.size()) + " for " + shape_string(A.shape()));
  }
  Tensor out = A;
  const std::size_t cols = A.cols();
  for (std::size_t r = 0; r < A.rows(); ++r) {
    auto row = out.row(r);
    if (!mask.empty()) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (!mask[r * cols + c]) row[c] += kMaskedScore;
      }
    }
    double mx = *std::max_element(row.begin(), row.end());
    double total = 0.0;
    for (auto& v : row) {
      v = std::exp(v - mx);
      total += v;
    }
    for (auto& v : row) v /= total;
  }
  return detail::tape_of(a).record("softmax", std::move(out), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const Tensor& y = t.value(self);
    Tensor& ga = t.grad_buffer(a.id);
    const std::size_t cols = y.cols();
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) dot += g[r * cols + c] * y[r * cols + c];
      for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += y[r * cols + c] * (g[r * cols + c] - dot);
    }
  });
}

// Joins matrices along axis 0 (rows) or 1 (columns); rank-1 inputs join
// end to end.
inline Var concat(std::span<const Var> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Tensor& first = parts[0].value();
  const std::size_t rank = first.rank();
  if (rank == 1 && axis != 0) throw ShapeError("concat: axis out of range for vectors");
  if (rank == 2 && axis > 1) throw ShapeError("concat: axis out of range for matrices");
  if (rank != 1 && rank != 2) throw ShapeError("concat: expected rank 1 or 2");

  std::size_t total = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    if (v.rank() != rank) detail::shape_mismatch("concat", first.shape(), v.shape());
    if (rank == 2 && axis == 0 && v.cols() != first.cols()) detail::shape_mismatch("concat", first.shape(), v.shape());
    if (rank == 2 && axis == 1 && v.rows() != first.rows()) detail::shape_mismatch("concat", first.shape(), v.shape());
    total += rank == 1 ? v.size() : v.shape()[axis];
  }

  Tensor out;
  if (rank == 1) {
    out = Tensor::vector(total);
  } else if (axis == 0) {
    out = Tensor::matrix(total, first.cols());
  } else {
    out = Tensor::matrix(first.rows(), total);
  }
  // Row-major: axis 0 (and rank 1) is a plain append, axis 1 interleaves.
  const bool interleave = rank == 2 && axis == 1;
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const Tensor& v = p.value();
    if (!interleave) {
      std::copy(v.data(), v.data() + v.size(), out.data() + offset);
      offset += v.size();
    } else {
      for (std::size_t r = 0; r < v.rows(); ++r) {
        std::copy(v.row(r).begin(), v.row(r).end(), out.row(r).begin() + static_cast<std::ptrdiff_t>(offset));
      }
      offset += v.cols();
    }
  }

  std::vector<Var> inputs(parts.begin(), parts.end());
  return detail::tape_of(parts[0]).record("concat", std::move(out), parts, [inputs, interleave](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    std::size_t offset = 0;
    for (const auto& p : inputs) {
      const Tensor& v = t.value(p.id);
      if (t.needs_grad(p.id)) {
        Tensor& gp = t.grad_buffer(p.id);
        if (!interleave) {
          for (std::size_t i = 0; i < v.size(); ++i) gp[i] += g[offset + i];
        } else {
          for (std::size_t r = 0; r < v.rows(); ++r) {
            for (std::size_t c = 0; c < v.cols(); ++c) gp[r * v.cols() + c] += g[r * g.cols() + offset + c];
          }
        }
      }
      offset += interleave ? v.cols() : v.size();
    }
  });
}

inline Var concat(std::initializer_list<Var> parts, std::size_t axis) {
  return concat(std::span<const Var>(parts.begin(), parts.size()), axis);
}

// Rows of `table` selected by `ids`. Row 0 is the padding row and never
// receives gradient.
inline Var gather(Var table, std::span<const std::int32_t> ids) {
  const Tensor& E = table.value();
  detail::require_matrix("gather", E);
  Tensor out = Tensor::matrix(ids.size(), E.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= E.rows()) {
      throw BoundsError("gather: index " + std::to_string(ids[i]) + " outside table of " +
                        std::to_string(E.rows()) + " rows");
    }
    auto src = E.row(static_cast<std::size_t>(ids[i]));
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  std::vector<std::int32_t> saved(ids.begin(), ids.end());
  return detail::tape_of(table).record("gather", std::move(out), {table},
                                       [table, saved = std::move(saved)](Tape& t, std::size_t self) {
                                         const Tensor& g = t.grad(self);
                                         Tensor& ge = t.grad_buffer(table.id);
                                         const std::size_t cols = g.cols();
                                         for (std::size_t i = 0; i < saved.size(); ++i) {
                                           if (saved[i] == 0) continue;
                                           auto dst = ge.row(static_cast<std::size_t>(saved[i]));
                                           for (std::size_t c = 0; c < cols; ++c) dst[c] += g[i * cols + c];
                                         }
                                       });
}

// Row i of the result is row i of `a` where keep[i] != 0, else row i of `b`.
inline Var select_rows(std::span<const std::uint8_t> keep, Var a, Var b) {
  const Tensor& A = a.value();
  const Tensor& B = b.value();
  detail::require_matrix("select_rows", A);
  if (A.shape() != B.shape()) detail::shape_mismatch("select_rows", A.shape(), B.shape());
  if (keep.size() != A.rows()) throw ShapeError("select_rows: mask length does not match row count");
  Tensor out = B;
  for (std::size_t r = 0; r < A.rows(); ++r) {
    if (keep[r]) std::copy(A.row(r).begin(), A.row(r).end(), out.row(r).begin());
  }
  std::vector<std::uint8_t> saved(keep.begin(), keep.end());
  return detail::tape_of(a).record("select_rows", std::move(out), {a, b},
                                   [a, b, saved = std::move(saved)](Tape& t, std::size_t self) {
                                     const Tensor& g = t.grad(self);
                                     const std::size_t cols = g.cols();
                                     for (std::size_t r = 0; r < saved.size(); ++r) {
                                       std::size_t target = saved[r] ? a.id : b.id;
                                       if (!t.needs_grad(target)) continue;
                                       auto dst = t.grad_buffer(target).row(r);
                                       for (std::size_t c = 0; c < cols; ++c) dst[c] += g[r * cols + c];
                                     }
                                   });
}

// Column j of a matrix as an (rows × 1) matrix.
inline Var column(Var a, std::size_t j) {
  const Tensor& A = a.value();
  detail::require_matrix("column", A);
  if (j >= A.cols()) throw BoundsError("column: index " + std::to_string(j) + " out of range");
  Tensor out = Tensor::matrix(A.rows(), 1);
  for (std::size_t r = 0; r < A.rows(); ++r) out[r] = A.at(r, j);
  return detail::tape_of(a).record("column", std::move(out), {a}, [a, j](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    Tensor& ga = t.grad_buffer(a.id);
    for (std::size_t r = 0; r < g.size(); ++r) ga.at(r, j) += g[r];
  });
}

// Row i of `a` scaled by weights[i, 0]; weights is (rows × 1).
inline Var scale_rows(Var a, Var weights) {
  const Tensor& A = a.value();
  const Tensor& W = weights.value();
  detail::require_matrix("scale_rows", A);
  if (W.rank() != 2 || W.cols() != 1 || W.rows() != A.rows()) detail::shape_mismatch("scale_rows", A.shape(), W.shape());
  Tensor out = A;
  const std::size_t cols = A.cols();
  for (std::size_t r = 0; r < A.rows(); ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] *= W[r];
  }
  return detail::tape_of(a).record("scale_rows", std::move(out), {a, weights}, [a, weights](Tape& t, std::size_t self) {
    const Tensor& g = t.grad(self);
    const std::size_t cols = g.cols();
    if (t.needs_grad(a.id)) {
      Tensor& ga = t.grad_buffer(a.id);
      const Tensor& W = t.value(weights.id);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += g[r * cols + c] * W[r];
      }
    }
    if (t.needs_grad(weights.id)) {
      Tensor& gw = t.grad_buffer(weights.id);
      const Tensor& A = t.value(a.id);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) s += g[r * cols + c] * A[r * cols + c];
        gw[r] += s;
      }
    }
  });
}

// Sum of all entries, as a scalar.
inline Var sum(Var a) {
  const Tensor& A = a.value();
  double s = 0.0;
  for (double v : A.values()) s += v;
  return detail::tape_of(a).record("sum", Tensor::scalar(s), {a}, [a](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    for (auto& v : t.grad_buffer(a.id).values()) v += g;
  });
}

inline constexpr double kProbabilityClamp = 1e-7;

// Mean binary cross-entropy of probabilities against 0/1 targets.
// Probabilities are clamped to [1e-7, 1 - 1e-7]; clamped entries pass no
// gradient.
inline Var bce_loss(Var probabilities, std::span<const double> targets) {
  const Tensor& P = probabilities.value();
  if (P.size() != targets.size() || P.size() == 0) {
    throw ShapeError("bce_loss: " + std::to_string(P.size()) + " predictions for " +
                     std::to_string(targets.size()) + " targets");
  }
  const double n = static_cast<double>(P.size());
  double loss = 0.0;
  for (std::size_t i = 0; i < P.size(); ++i) {
    double p = std::clamp(P[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    loss -= targets[i] * std::log(p) + (1.0 - targets[i]) * std::log(1.0 - p);
  }
  std::vector<double> y(targets.begin(), targets.end());
  return detail::tape_of(probabilities)
      .record("bce_loss", Tensor::scalar(loss / n), {probabilities}, [probabilities, y = std::move(y), n](Tape& t, std::size_t self) {
        const double g = t.grad(self)[0];
        const Tensor& P = t.value(probabilities.id);
        Tensor& gp = t.grad_buffer(probabilities.id);
        for (std::size_t i = 0; i < P.size(); ++i) {
          if (P[i] < kProbabilityClamp || P[i] > 1.0 - kProbabilityClamp) continue;
          gp[i] += g * (-y[i] / P[i] + (1.0 - y[i]) / (1.0 - P[i])) / n;
        }
      });
}

// Plain scalar BCE for a single prediction.
inline double bce(double p, double y) {
  p = std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
  return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

}  // namespace biaslang::ad
