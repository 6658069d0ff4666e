// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The FIQ Authors

#include "fiq/numkit/ops.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <vector>

namespace fiq::numkit {

namespace {

std::atomic<bool> g_checked{false};

template <typename T>
[[noreturn]] void shape_error(const char* op, const Matrix<T>& a, const Matrix<T>& b) {
  throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_string() + " and " +
                       b.shape_string());
}

template <typename T>
void require_same_shape(const char* op, const Matrix<T>& a, const Matrix<T>& b) {
  if (!a.same_shape(b)) shape_error(op, a, b);
}

// Work above this many multiply-adds is split across threads in fast mode.
constexpr std::size_t kParallelThreshold = std::size_t{1} << 21;

template <typename Fn>
void for_rows(std::size_t rows, std::size_t work, Fn&& fn) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (checked_mode() || work < kParallelThreshold || hw == 1 || rows < 2) {
    fn(std::size_t{0}, rows);
    return;
  }
  const std::size_t shards = std::min<std::size_t>(hw, rows);
  const std::size_t chunk = (rows + shards - 1) / shards;
  std::vector<std::thread> workers;
  for (std::size_t begin = 0; begin < rows; begin += chunk) {
    workers.emplace_back([&fn, begin, end = std::min(rows, begin + chunk)] { fn(begin, end); });
  }
  for (auto& w : workers) w.join();
}

// Fast-mode dot product with four partial sums.
template <typename T>
T dot_unrolled(const T* x, const T* y, std::size_t n) {
  T s0{0}, s1{0}, s2{0}, s3{0};
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += x[k] * y[k];
    s1 += x[k + 1] * y[k + 1];
    s2 += x[k + 2] * y[k + 2];
    s3 += x[k + 3] * y[k + 3];
  }
  for (; k < n; ++k) s0 += x[k] * y[k];
  return (s0 + s1) + (s2 + s3);
}

// c = a * bt^T where bt is stored row-major (n x k). Shared by all products.
template <typename T>
Matrix<T> product_with_transposed(const Matrix<T>& a, const Matrix<T>& bt) {
  const std::size_t m = a.rows(), n = bt.rows(), inner = a.cols();
  Matrix<T> c(m, n);
  const bool checked = checked_mode();
  for_rows(m, m * n * inner, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const T* ai = a.row(i).data();
      for (std::size_t j = 0; j < n; ++j) {
        const T* bj = bt.row(j).data();
        if (checked) {
          T acc{0};
          for (std::size_t k = 0; k < inner; ++k) acc += ai[k] * bj[k];
          c(i, j) = acc;
        } else {
          c(i, j) = dot_unrolled(ai, bj, inner);
        }
      }
    }
  });
  return c;
}

}  // namespace

bool checked_mode() noexcept { return g_checked.load(std::memory_order_relaxed); }
void set_checked_mode(bool on) noexcept { g_checked.store(on, std::memory_order_relaxed); }

template <typename T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
  return t;
}

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows()) shape_error("matmul", a, b);
  return product_with_transposed(a, transpose(b));
}

template <typename T>
Matrix<T> matmul_tn(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != b.rows()) shape_error("matmul_tn", a, b);
  return product_with_transposed(transpose(a), transpose(b));
}

template <typename T>
Matrix<T> matmul_nt(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.cols()) shape_error("matmul_nt", a, b);
  return product_with_transposed(a, b);
}

template <typename T>
Matrix<T> add(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_shape("add", a, b);
  Matrix<T> out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

template <typename T>
Matrix<T> sub(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_shape("sub", a, b);
  Matrix<T> out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] -= bd[i];
  return out;
}

template <typename T>
Matrix<T> hadamard(const Matrix<T>& a, const Matrix<T>& b) {
  require_same_shape("hadamard", a, b);
  Matrix<T> out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= bd[i];
  return out;
}

template <typename T>
Matrix<T> scale(const Matrix<T>& a, T s) {
  Matrix<T> out = a;
  for (auto& v : out.data()) v *= s;
  return out;
}

template <typename T>
void axpy(Matrix<T>& dst, const Matrix<T>& src, T alpha) {
  require_same_shape("axpy", dst, src);
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += alpha * s[i];
}

template <typename T>
Matrix<T> add_row_broadcast(const Matrix<T>& m, const Matrix<T>& row) {
  if (row.rows() != 1 || row.cols() != m.cols()) shape_error("add_row_broadcast", m, row);
  Matrix<T> out = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) += row(0, j);
  return out;
}

template <typename T>
Matrix<T> col_sum(const Matrix<T>& m) {
  Matrix<T> out(1, m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(0, j) += m(i, j);
  return out;
}

template <typename T>
Matrix<T> mean_rows(const Matrix<T>& m) {
  if (m.rows() == 0) throw DimensionError("mean_rows: matrix has no rows");
  Matrix<T> out = col_sum(m);
  const T inv = T{1} / static_cast<T>(m.rows());
  for (auto& v : out.data()) v *= inv;
  return out;
}

template <typename T>
Matrix<T> slice_cols(const Matrix<T>& m, std::size_t begin, std::size_t count) {
  if (begin + count > m.cols()) {
    throw DimensionError("slice_cols: range [" + std::to_string(begin) + ", " +
                         std::to_string(begin + count) + ") outside " + m.shape_string());
  }
  Matrix<T> out(m.rows(), count);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < count; ++j) out(i, j) = m(i, begin + j);
  return out;
}

template <typename T>
void assign_cols(Matrix<T>& dst, std::size_t begin, const Matrix<T>& src) {
  if (src.rows() != dst.rows() || begin + src.cols() > dst.cols()) shape_error("assign_cols", dst, src);
  for (std::size_t i = 0; i < src.rows(); ++i)
    for (std::size_t j = 0; j < src.cols(); ++j) dst(i, begin + j) = src(i, j);
}

template <typename T>
Matrix<T> head_rows(const Matrix<T>& m, std::size_t count) {
  if (count > m.rows()) {
    throw DimensionError("head_rows: " + std::to_string(count) + " rows requested from " +
                         m.shape_string());
  }
  Matrix<T> out(count, m.cols());
  std::copy_n(m.data().begin(), count * m.cols(), out.data().begin());
  return out;
}

template <typename T>
Matrix<T> softmax_rows(const Matrix<T>& m) {
  if (m.empty()) throw DimensionError("softmax_rows: empty matrix");
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto in = m.row(i);
    auto o = out.row(i);
    const T mx = *std::max_element(in.begin(), in.end());
    T sum{0};
    for (std::size_t j = 0; j < in.size(); ++j) {
      o[j] = std::exp(in[j] - mx);
      sum += o[j];
    }
    for (auto& v : o) v /= sum;
  }
  return out;
}

template <typename T>
Matrix<T> softmax_rows_backward(const Matrix<T>& y, const Matrix<T>& dy) {
  require_same_shape("softmax_rows_backward", y, dy);
  Matrix<T> dx(y.rows(), y.cols());
  for (std::size_t i = 0; i < y.rows(); ++i) {
    T dot{0};
    for (std::size_t j = 0; j < y.cols(); ++j) dot += y(i, j) * dy(i, j);
    for (std::size_t j = 0; j < y.cols(); ++j) dx(i, j) = y(i, j) * (dy(i, j) - dot);
  }
  return dx;
}

template <typename T>
Matrix<T> layer_norm(const Matrix<T>& m, const Matrix<T>& gain, const Matrix<T>& bias, T eps,
                     LayerNormCache<T>* cache) {
  if (m.cols() == 0) throw DimensionError("layer_norm: zero-width matrix " + m.shape_string());
  if (gain.size() != m.cols() || bias.size() != m.cols()) shape_error("layer_norm", m, gain);
  if (!(eps > T{0})) throw ConfigError("layer_norm: eps must be positive");
  const std::size_t n = m.cols();
  const T count = static_cast<T>(n);
  Matrix<T> out(m.rows(), n);
  Matrix<T> xhat(m.rows(), n);
  std::vector<T> inv_std(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto x = m.row(i);
    T mean{0};
    for (T v : x) mean += v;
    mean /= count;
    T var{0};
    for (T v : x) var += (v - mean) * (v - mean);
    var /= count;
    const T sd = std::sqrt(var + eps);
    inv_std[i] = T{1} / sd;
    for (std::size_t j = 0; j < n; ++j) {
      xhat(i, j) = (x[j] - mean) / sd;
      out(i, j) = xhat(i, j) * gain.data()[j] + bias.data()[j];
    }
  }
  if (cache != nullptr) {
    cache->normalized = std::move(xhat);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

template <typename T>
Matrix<T> layer_norm(const Matrix<T>& m, const Param<T>& gain, const Param<T>& bias, T eps) {
  return layer_norm(m, gain.value, bias.value, eps, static_cast<LayerNormCache<T>*>(nullptr));
}

template <typename T>
Matrix<T> layer_norm_backward(const LayerNormCache<T>& cache, const Matrix<T>& gain,
                              const Matrix<T>& dy, Matrix<T>& dgain, Matrix<T>& dbias) {
  const Matrix<T>& xhat = cache.normalized;
  require_same_shape("layer_norm_backward", xhat, dy);
  const std::size_t n = xhat.cols();
  const T inv_n = T{1} / static_cast<T>(n);
  Matrix<T> dx(xhat.rows(), n);
  std::vector<T> dxhat(n);
  for (std::size_t i = 0; i < xhat.rows(); ++i) {
    T mean_d{0}, mean_dx{0};
    for (std::size_t j = 0; j < n; ++j) {
      dgain.data()[j] += dy(i, j) * xhat(i, j);
      dbias.data()[j] += dy(i, j);
      dxhat[j] = dy(i, j) * gain.data()[j];
      mean_d += dxhat[j];
      mean_dx += dxhat[j] * xhat(i, j);
    }
    mean_d *= inv_n;
    mean_dx *= inv_n;
    for (std::size_t j = 0; j < n; ++j) {
      dx(i, j) = cache.inv_std[i] * (dxhat[j] - mean_d - xhat(i, j) * mean_dx);
    }
  }
  return dx;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

template <typename T>
Matrix<T> gelu(const Matrix<T>& x) {
  Matrix<T> out = x;
  for (auto& v : out.data()) {
    const T u = static_cast<T>(kGeluC) * (v + static_cast<T>(kGeluA) * v * v * v);
    v = T{0.5} * v * (T{1} + std::tanh(u));
  }
  return out;
}

template <typename T>
Matrix<T> gelu_backward(const Matrix<T>& x, const Matrix<T>& dy) {
  require_same_shape("gelu_backward", x, dy);
  Matrix<T> dx(x.rows(), x.cols());
  auto xs = x.data();
  auto ds = dy.data();
  auto out = dx.data();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const T v = xs[i];
    const T u = static_cast<T>(kGeluC) * (v + static_cast<T>(kGeluA) * v * v * v);
    const T t = std::tanh(u);
    const T du = static_cast<T>(kGeluC) * (T{1} + T{3} * static_cast<T>(kGeluA) * v * v);
    out[i] = ds[i] * (T{0.5} * (T{1} + t) + T{0.5} * v * (T{1} - t * t) * du);
  }
  return dx;
}

template <typename T>
Matrix<T> tanh(const Matrix<T>& x) {
  Matrix<T> out = x;
  for (auto& v : out.data()) v = std::tanh(v);
  return out;
}

template <typename T>
Matrix<T> dropout_mask(std::size_t rows, std::size_t cols, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  Matrix<T> mask(rows, cols, T{1});
  if (rate == 0.0) return mask;
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& v : mask.data()) v = rng.uniform() < rate ? T{0} : keep_scale;
  return mask;
}

#define FIQ_INSTANTIATE_OPS(T)                                                                   \
  template Matrix<T> matmul(const Matrix<T>&, const Matrix<T>&);                                 \
  template Matrix<T> matmul_tn(const Matrix<T>&, const Matrix<T>&);                              \
  template Matrix<T> matmul_nt(const Matrix<T>&, const Matrix<T>&);                              \
  template Matrix<T> transpose(const Matrix<T>&);                                                \
  template Matrix<T> add(const Matrix<T>&, const Matrix<T>&);                                    \
  template Matrix<T> sub(const Matrix<T>&, const Matrix<T>&);                                    \
  template Matrix<T> hadamard(const Matrix<T>&, const Matrix<T>&);                               \
  template Matrix<T> scale(const Matrix<T>&, T);                                                 \
  template void axpy(Matrix<T>&, const Matrix<T>&, T);                                           \
  template Matrix<T> add_row_broadcast(const Matrix<T>&, const Matrix<T>&);                      \
  template Matrix<T> col_sum(const Matrix<T>&);                                                  \
  template Matrix<T> mean_rows(const Matrix<T>&);                                                \
  template Matrix<T> slice_cols(const Matrix<T>&, std::size_t, std::size_t);                     \
  template void assign_cols(Matrix<T>&, std::size_t, const Matrix<T>&);                          \
  template Matrix<T> head_rows(const Matrix<T>&, std::size_t);                                   \
  template Matrix<T> softmax_rows(const Matrix<T>&);                                             \
  template Matrix<T> softmax_rows_backward(const Matrix<T>&, const Matrix<T>&);                  \
  template Matrix<T> layer_norm(const Matrix<T>&, const Matrix<T>&, const Matrix<T>&, T,         \
                                LayerNormCache<T>*);                                             \
  template Matrix<T> layer_norm(const Matrix<T>&, const Param<T>&, const Param<T>&, T);          \
  template Matrix<T> layer_norm_backward(const LayerNormCache<T>&, const Matrix<T>&,             \
                                         const Matrix<T>&, Matrix<T>&, Matrix<T>&);              \
  template Matrix<T> gelu(const Matrix<T>&);                                                     \
  template Matrix<T> gelu_backward(const Matrix<T>&, const Matrix<T>&);                          \
  template Matrix<T> tanh(const Matrix<T>&);                                                     \
  template Matrix<T> dropout_mask<T>(std::size_t, std::size_t, double, Rng&);

FIQ_INSTANTIATE_OPS(float)
FIQ_INSTANTIATE_OPS(double)

#undef FIQ_INSTANTIATE_OPS

}  // namespace fiq::numkit
