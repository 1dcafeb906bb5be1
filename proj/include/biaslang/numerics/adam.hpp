#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "biaslang/error.hpp"
#include "biaslang/numerics/tensor.hpp"

namespace biaslang::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers are created on the first step
// and are positional: the same parameter list must be passed every step.
class Adam {
 public:
  explicit Adam(AdamConfig config = {}) : config_(config) {}

  // A null gradient counts as zero. Non-finite gradients abort the update
  // before any parameter or moment is touched.
  void step(std::span<Tensor* const> params, std::span<const Tensor* const> grads) {
    if (params.size() != grads.size()) throw ShapeError("adam: parameter and gradient counts differ");
    if (first_.empty()) {
      for (auto* p : params) {
        first_.emplace_back(p->shape());
        second_.emplace_back(p->shape());
      }
    }
    if (first_.size() != params.size()) throw ShapeError("adam: parameter list changed between steps");
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (params[i]->shape() != first_[i].shape()) {
        throw ShapeError("adam: parameter " + std::to_string(i) + " changed shape");
      }
      if (grads[i] && grads[i]->shape() != params[i]->shape()) {
        throw ShapeError("adam: gradient " + std::to_string(i) + " has shape " + shape_string(grads[i]->shape()) +
                         ", parameter has " + shape_string(params[i]->shape()));
      }
      if (grads[i] && !grads[i]->all_finite()) {
        throw NumericFault("adam: non-finite gradient for parameter " + std::to_string(i));
      }
    }

    ++steps_;
    const double t = static_cast<double>(steps_);
    const double correction1 = 1.0 - std::pow(config_.beta1, t);
    const double correction2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
      Tensor& p = *params[i];
      Tensor& m = first_[i];
      Tensor& v = second_[i];
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double g = grads[i] ? (*grads[i])[k] : 0.0;
        m[k] = config_.beta1 * m[k] + (1.0 - config_.beta1) * g;
        v[k] = config_.beta2 * v[k] + (1.0 - config_.beta2) * g * g;
        const double m_hat = m[k] / correction1;
        const double v_hat = v[k] / correction2;
        p[k] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
      }
    }
  }

  std::uint64_t step_count() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  const Tensor& first_moment(std::size_t i) const { return first_.at(i); }
  const Tensor& second_moment(std::size_t i) const { return second_.at(i); }

 private:
  AdamConfig config_;
  std::uint64_t steps_ = 0;
  std::vector<Tensor> first_;
  std::vector<Tensor> second_;
};

}  // namespace biaslang::ad
