#pragma once

#include <cmath>
#include <vector>

#include "s2k/nn/autodiff.hpp"

namespace s2k::nn {

template <class T>
struct AdamConfig {
  T lr = T(0.001);
  T beta1 = T(0.5);
  T beta2 = T(0.999);
  T eps = T(1e-8);
};

// Adam with bias correction. Holds first/second moment buffers per
// registered parameter; step() reads the parameters' current grads.
template <class T>
class Adam {
 public:
  Adam(std::vector<Var<T>> params, AdamConfig<T> cfg)
      : params_(std::move(params)), cfg_(cfg) {
    m_.resize(params_.size());
    v_.resize(params_.size());
    for (std::size_t i = 0; i < params_.size(); ++i) {
      m_[i].assign(params_[i]->count(), T(0));
      v_[i].assign(params_[i]->count(), T(0));
    }
  }

  void step() {
    ++t_;
    T bc1 = T(1) - std::pow(cfg_.beta1, T(t_));
    T bc2 = T(1) - std::pow(cfg_.beta2, T(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto& p = *params_[i];
      if (!p.requires_grad)
        throw InvalidArgument("Adam::step: parameter '" + p.name +
                              "' is frozen");
      for (std::size_t k = 0; k < p.count(); ++k) {
        T g = p.grad[k];
        m_[i][k] = cfg_.beta1 * m_[i][k] + (T(1) - cfg_.beta1) * g;
        v_[i][k] = cfg_.beta2 * v_[i][k] + (T(1) - cfg_.beta2) * g * g;
        T mhat = m_[i][k] / bc1;
        T vhat = v_[i][k] / bc2;
        p.val[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

  void zero_grad() {
    for (auto& p : params_)
      if (p->requires_grad) p->zero_grad();
  }

  long steps_taken() const { return t_; }

 private:
  std::vector<Var<T>> params_;
  AdamConfig<T> cfg_;
  std::vector<std::vector<T>> m_, v_;
  long t_ = 0;
};

}  // namespace s2k::nn
