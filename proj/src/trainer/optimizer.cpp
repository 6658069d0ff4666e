// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/trainer/optimizer.hpp"

#include <cmath>

namespace fiq::trainer {

template <typename T>
Adam<T>::Adam(const numkit::ParamStore<T>& store) {
  for (const auto& p : store) {
    m_.emplace_back(p.rows(), p.cols());
    v_.emplace_back(p.rows(), p.cols());
  }
}

template <typename T>
void Adam<T>::step(numkit::ParamStore<T>& store, double lr, const TrainConfig& c) {
  if (m_.size() != store.size()) throw ConfigError("optimizer state does not match parameter store");
  ++steps_;
  const double t = static_cast<double>(steps_);
  const double bc1 = 1.0 - std::pow(c.beta1, t);
  const double bc2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < store.size(); ++k) {
    auto& p = store[k];
    auto value = p.value.data();
    auto grad = p.grad.data();
    auto m = m_[k].data();
    auto v = v_[k].data();
    for (std::size_t i = 0; i < value.size(); ++i) {
      const double g = static_cast<double>(grad[i]);
      const double mi = c.beta1 * static_cast<double>(m[i]) + (1.0 - c.beta1) * g;
      const double vi = c.beta2 * static_cast<double>(v[i]) + (1.0 - c.beta2) * g * g;
      m[i] = static_cast<T>(mi);
      v[i] = static_cast<T>(vi);
      const double update = lr * (mi / bc1) / (std::sqrt(vi / bc2) + c.adam_eps);
      value[i] = static_cast<T>(static_cast<double>(value[i]) - update);
    }
  }
}

template <typename T>
void update_ema(numkit::ParamStore<T>& store, double decay) {
  for (auto& p : store) {
    auto ema = p.ema.data();
    auto value = p.value.data();
    for (std::size_t i = 0; i < ema.size(); ++i) {
      ema[i] = static_cast<T>(decay * static_cast<double>(ema[i]) +
                              (1.0 - decay) * static_cast<double>(value[i]));
    }
  }
}

template class Adam<float>;
template class Adam<double>;
template void update_ema<float>(numkit::ParamStore<float>&, double);
template void update_ema<double>(numkit::ParamStore<double>&, double);

}  // namespace fiq::trainer
