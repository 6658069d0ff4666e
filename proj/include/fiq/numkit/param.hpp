// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#pragma once

#include <cmath>
#include <cstddef>
#include <deque>
#include <string>
#include <unordered_map>

#include "fiq/numkit/matrix.hpp"
#include "fiq/numkit/rng.hpp"

namespace fiq::numkit {

/// How a parameter is filled by ParamStore::initialize.
struct Init {
  enum class Kind { kZeros, kOnes, kUniformFanIn };
  Kind kind = Kind::kZeros;
  std::size_t fan_in = 0;

  static Init zeros() { return {Kind::kZeros, 0}; }
  static Init ones() { return {Kind::kOnes, 0}; }
  /// uniform(-1/sqrt(fan_in), +1/sqrt(fan_in))
  static Init uniform_fan_in(std::size_t fan_in) { return {Kind::kUniformFanIn, fan_in}; }
};

template <typename T>
struct Param {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> ema;
  Init init;

  std::size_t rows() const noexcept { return value.rows(); }
  std::size_t cols() const noexcept { return value.cols(); }
};

/// Named parameters in declaration order. References returned by add() and
/// at() stay valid for the lifetime of the store.
template <typename T>
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(const ParamStore& other) { *this = other; }
  ParamStore& operator=(const ParamStore& other) {
    if (this != &other) {
      params_ = other.params_;
      index_ = other.index_;
    }
    return *this;
  }
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;

  Param<T>& add(const std::string& name, std::size_t rows, std::size_t cols, Init init) {
    if (index_.count(name) != 0) throw ConfigError("duplicate parameter name '" + name + "'");
    index_.emplace(name, params_.size());
    params_.push_back(Param<T>{name, Matrix<T>(rows, cols), Matrix<T>(rows, cols),
                               Matrix<T>(rows, cols), init});
    return params_.back();
  }

  /// Returns the existing parameter (after a shape check) or declares it.
  Param<T>& get_or_add(const std::string& name, std::size_t rows, std::size_t cols, Init init) {
    if (auto* p = find(name)) {
      if (p->rows() != rows || p->cols() != cols) {
        throw DimensionError("parameter '" + name + "' has shape " + p->value.shape_string() +
                             ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
      }
      return *p;
    }
    return add(name, rows, cols, init);
  }

  Param<T>* find(const std::string& name) {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }
  const Param<T>* find(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? nullptr : &params_[it->second];
  }

  Param<T>& at(const std::string& name) {
    if (auto* p = find(name)) return *p;
    throw ConfigError("unknown parameter '" + name + "'");
  }
  const Param<T>& at(const std::string& name) const {
    if (const auto* p = find(name)) return *p;
    throw ConfigError("unknown parameter '" + name + "'");
  }

  std::size_t size() const noexcept { return params_.size(); }
  std::size_t scalar_count() const noexcept {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.value.size();
    return n;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  Param<T>& operator[](std::size_t i) { return params_[i]; }
  const Param<T>& operator[](std::size_t i) const { return params_[i]; }

  void zero_grad() {
    for (auto& p : params_) p.grad.fill(T{0});
  }

  /// Fills values in declaration order from rng and copies them into ema.
  void initialize(Rng& rng) {
    for (auto& p : params_) {
      switch (p.init.kind) {
        case Init::Kind::kZeros:
          p.value.fill(T{0});
          break;
        case Init::Kind::kOnes:
          p.value.fill(T{1});
          break;
        case Init::Kind::kUniformFanIn: {
          const double bound = 1.0 / std::sqrt(static_cast<double>(p.init.fan_in));
          for (auto& v : p.value.data()) v = static_cast<T>(rng.uniform(-bound, bound));
          break;
        }
      }
      p.ema = p.value;
    }
  }

  /// Same names, shapes and contents converted to another scalar type.
  template <typename U>
  ParamStore<U> cast() const {
    ParamStore<U> out;
    for (const auto& p : params_) {
      auto& q = out.add(p.name, p.rows(), p.cols(), p.init);
      q.value = p.value.template cast<U>();
      q.grad = p.grad.template cast<U>();
      q.ema = p.ema.template cast<U>();
    }
    return out;
  }

  /// Copies values by name; every parameter of this store must exist in src.
  template <typename U>
  void copy_values_from(const ParamStore<U>& src) {
    for (auto& p : params_) {
      const auto& q = src.at(p.name);
      if (q.rows() != p.rows() || q.cols() != p.cols()) {
        throw DimensionError("shape mismatch copying parameter '" + p.name + "'");
      }
      p.value = q.value.template cast<T>();
    }
  }

  /// value <- ema for every parameter.
  void load_ema_into_values() {
    for (auto& p : params_) p.value = p.ema;
  }

 private:
  std::deque<Param<T>> params_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace fiq::numkit
