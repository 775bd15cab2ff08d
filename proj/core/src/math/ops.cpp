// SPDX-License-Identifier: Apache-2.0
#include "armi/math/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "armi/errors.hpp"

namespace armi {
namespace {

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) {
    throw DimensionError(std::string(op) + ": shapes " + shape_to_string(a.shape()) + " and " +
                         shape_to_string(b.shape()) + " differ");
  }
}

void require_rank(const char* op, const Tensor& x, std::size_t rank) {
  if (x.rank() != rank) {
    throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) +
                         ", got shape " + shape_to_string(x.shape()));
  }
}

// The kernels are element-wise (no reassociated reductions), so a wider
// vector clone produces the same bits as the baseline one.
#if defined(__GNUC__) && defined(__x86_64__) && !defined(__clang__)
#define ARMI_VECTOR_CLONES __attribute__((target_clones("avx2", "default")))
#else
#define ARMI_VECTOR_CLONES
#endif

// C[m x n] += A[m x k] * B[k x n]
ARMI_VECTOR_CLONES
void gemm_nn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    const double* arow = a + i * k;
    std::size_t p = 0;
    // Four rows of B per pass keep crow[j] in a register; the additions
    // still happen in ascending p order.
    for (; p + 4 <= k; p += 4) {
      const double a0 = arow[p], a1 = arow[p + 1], a2 = arow[p + 2], a3 = arow[p + 3];
      const double* b0 = b + p * n;
      const double* b1 = b0 + n;
      const double* b2 = b1 + n;
      const double* b3 = b2 + n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = (((crow[j] + a0 * b0[j]) + a1 * b1[j]) + a2 * b2[j]) + a3 * b3[j];
    }
    for (; p < k; ++p) {
      const double av = arow[p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

// C[m x k] += A[m x n] * B[k x n]^T. B is transposed once so the inner loop
// is a contiguous axpy instead of a serial dot-product reduction.
void gemm_nt(const double* a, const double* b, double* c, std::size_t m, std::size_t n,
             std::size_t k) {
  std::vector<double> bt(n * k);
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t j = 0; j < n; ++j) bt[j * k + p] = b[p * n + j];
  }
  gemm_nn(a, bt.data(), c, m, n, k);
}

// C[k x n] += A[m x k]^T * B[m x n]
ARMI_VECTOR_CLONES
void gemm_tn(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
             std::size_t n) {
  std::size_t i = 0;
  // Same blocking as gemm_nn, over four rows of A and B; additions stay in
  // ascending i order.
  for (; i + 4 <= m; i += 4) {
    const double* a0 = a + i * k;
    const double* b0 = b + i * n;
    const double* b1 = b0 + n;
    const double* b2 = b1 + n;
    const double* b3 = b2 + n;
    for (std::size_t p = 0; p < k; ++p) {
      const double x0 = a0[p], x1 = a0[k + p], x2 = a0[2 * k + p], x3 = a0[3 * k + p];
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] = (((crow[j] + x0 * b0[j]) + x1 * b1[j]) + x2 * b2[j]) + x3 * b3[j];
    }
  }
  for (; i < m; ++i) {
    const double* arow = a + i * k;
    const double* brow = b + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double av = arow[p];
      double* crow = c + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

template <typename Forward, typename Derivative>
Tensor unary(const char* name, const Tensor& x, Forward f, Derivative df) {
  std::vector<double> out(x.size());
  const auto xv = x.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(xv[i]);
  return Tensor::from_op(name, x.shape(), std::move(out), {x},
                         [x, df](std::span<const double> y, std::span<const double> gy) {
                           auto gx = x.grad_buffer();
                           const auto xv = x.values();
                           for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * df(xv[i], y[i]);
                         });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.rank() < 2 || b.rank() != 2 || a.shape().back() != b.dim(0)) {
    throw DimensionError("matmul: cannot multiply " + shape_to_string(a.shape()) + " by " +
                         shape_to_string(b.shape()));
  }
  const std::size_t k = b.dim(0);
  const std::size_t n = b.dim(1);
  const std::size_t m = a.size() / k;
  Shape out_shape = a.shape();
  out_shape.back() = n;
  std::vector<double> out(m * n, 0.0);
  gemm_nn(a.values().data(), b.values().data(), out.data(), m, k, n);
  return Tensor::from_op("matmul", std::move(out_shape), std::move(out), {a, b},
                         [a, b, m, k, n](std::span<const double>, std::span<const double> gy) {
                           if (a.requires_grad()) {
                             gemm_nt(gy.data(), b.values().data(), a.grad_buffer().data(), m, n, k);
                           }
                           if (b.requires_grad()) {
                             gemm_tn(a.values().data(), gy.data(), b.grad_buffer().data(), m, k, n);
                           }
                         });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] + b.values()[i];
  return Tensor::from_op("add", a.shape(), std::move(out), {a, b},
                         [a, b](std::span<const double>, std::span<const double> gy) {
                           for (const Tensor* t : {&a, &b}) {
                             auto g = t->grad_buffer();
                             for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
                           }
                         });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.values()[i] * b.values()[i];
  return Tensor::from_op("mul", a.shape(), std::move(out), {a, b},
                         [a, b](std::span<const double>, std::span<const double> gy) {
                           auto ga = a.grad_buffer();
                           for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gy[i] * b.values()[i];
                           auto gb = b.grad_buffer();
                           for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += gy[i] * a.values()[i];
                         });
}

Tensor scale(const Tensor& x, double factor) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x.values()[i] * factor;
  return Tensor::from_op("scale", x.shape(), std::move(out), {x},
                         [x, factor](std::span<const double>, std::span<const double> gy) {
                           auto g = x.grad_buffer();
                           for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * factor;
                         });
}

Tensor add_bias(const Tensor& x, const Tensor& bias) {
  if (bias.rank() != 1 || x.rank() == 0 || x.shape().back() != bias.dim(0)) {
    throw DimensionError("add_bias: bias " + shape_to_string(bias.shape()) +
                         " does not match last axis of " + shape_to_string(x.shape()));
  }
  const std::size_t n = bias.dim(0);
  std::vector<double> out(x.values().begin(), x.values().end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bias.values()[i % n];
  return Tensor::from_op("add_bias", x.shape(), std::move(out), {x, bias},
                         [x, bias, n](std::span<const double>, std::span<const double> gy) {
                           auto gx = x.grad_buffer();
                           for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
                           auto gb = bias.grad_buffer();
                           if (!gb.empty()) {
                             for (std::size_t i = 0; i < gy.size(); ++i) gb[i % n] += gy[i];
                           }
                         });
}

Tensor tanh(const Tensor& x) {
  return unary(
      "tanh", x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      "sigmoid", x,
      [](double v) {
        if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor gelu(const Tensor& x) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  constexpr double kInvSqrt2Pi = 0.39894228040143267794;
  return unary(
      "gelu", x, [](double v) { return 0.5 * v * (1.0 + std::erf(v * kInvSqrt2)); },
      [](double v, double) {
        const double cdf = 0.5 * (1.0 + std::erf(v * kInvSqrt2));
        const double pdf = kInvSqrt2Pi * std::exp(-0.5 * v * v);
        return cdf + v * pdf;
      });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) + " invalid for shape " +
                         shape_to_string(x.shape()));
  }
  const std::size_t len = x.dim(axis);
  if (len == 0) throw DimensionError("softmax: empty axis in shape " + shape_to_string(x.shape()));
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < x.rank(); ++i) inner *= x.dim(i);
  const std::size_t outer = x.size() / (len * inner);

  std::vector<double> out(x.size());
  const auto xv = x.values();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t in = 0; in < inner; ++in) {
      const std::size_t base = o * len * inner + in;
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < len; ++j) peak = std::max(peak, xv[base + j * inner]);
      double total = 0.0;
      for (std::size_t j = 0; j < len; ++j) {
        const double e = std::exp(xv[base + j * inner] - peak);
        out[base + j * inner] = e;
        total += e;
      }
      for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= total;
    }
  }
  return Tensor::from_op(
      "softmax", x.shape(), std::move(out), {x},
      [x, outer, inner, len](std::span<const double> y, std::span<const double> gy) {
        auto gx = x.grad_buffer();
        for (std::size_t o = 0; o < outer; ++o) {
          for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * len * inner + in;
            double dot = 0.0;
            for (std::size_t j = 0; j < len; ++j) dot += gy[base + j * inner] * y[base + j * inner];
            for (std::size_t j = 0; j < len; ++j) {
              const std::size_t idx = base + j * inner;
              gx[idx] += y[idx] * (gy[idx] - dot);
            }
          }
        }
      });
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (x.rank() == 0 || x.shape().back() == 0) {
    throw DimensionError("layer_norm: zero-length feature axis in " + shape_to_string(x.shape()));
  }
  const std::size_t n = x.shape().back();
  if (gain.shape() != Shape{n} || bias.shape() != Shape{n}) {
    throw DimensionError("layer_norm: gain " + shape_to_string(gain.shape()) + " / bias " +
                         shape_to_string(bias.shape()) + " do not match feature axis of " +
                         shape_to_string(x.shape()));
  }
  const std::size_t rows = x.size() / n;
  std::vector<double> out(x.size());
  auto normalized = std::make_shared<std::vector<double>>(x.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  const auto xv = x.values();
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = xv.data() + r * n;
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += row[j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = inv;
    for (std::size_t j = 0; j < n; ++j) {
      const double xhat = (row[j] - mu) * inv;
      (*normalized)[r * n + j] = xhat;
      out[r * n + j] = gain.values()[j] * xhat + bias.values()[j];
    }
  }
  return Tensor::from_op(
      "layer_norm", x.shape(), std::move(out), {x, gain, bias},
      [x, gain, bias, n, rows, normalized, inv_std](std::span<const double>,
                                                    std::span<const double> gy) {
        auto gg = gain.grad_buffer();
        auto gb = bias.grad_buffer();
        auto gx = x.grad_buffer();
        const auto g = gain.values();
        std::vector<double> dxhat(n);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* xhat = normalized->data() + r * n;
          const double* dy = gy.data() + r * n;
          if (!gg.empty()) {
            for (std::size_t j = 0; j < n; ++j) gg[j] += dy[j] * xhat[j];
          }
          if (!gb.empty()) {
            for (std::size_t j = 0; j < n; ++j) gb[j] += dy[j];
          }
          if (gx.empty()) continue;
          double sum_d = 0.0;
          double sum_dx = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            dxhat[j] = dy[j] * g[j];
            sum_d += dxhat[j];
            sum_dx += dxhat[j] * xhat[j];
          }
          const double coef = (*inv_std)[r] / static_cast<double>(n);
          for (std::size_t j = 0; j < n; ++j) {
            gx[r * n + j] +=
                coef * (static_cast<double>(n) * dxhat[j] - sum_d - xhat[j] * sum_dx);
          }
        }
      });
}

Tensor embedding(const Tensor& table, std::span<const std::int64_t> ids, const Shape& prefix) {
  require_rank("embedding", table, 2);
  if (shape_size(prefix) != ids.size()) {
    throw DimensionError("embedding: " + std::to_string(ids.size()) + " ids for prefix " +
                         shape_to_string(prefix));
  }
  const std::size_t vocab = table.dim(0);
  const std::size_t d = table.dim(1);
  std::vector<double> out(ids.size() * d);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= vocab) {
      throw DimensionError("embedding: id " + std::to_string(ids[i]) + " outside table of " +
                           std::to_string(vocab) + " rows");
    }
    std::copy_n(table.values().begin() + static_cast<std::ptrdiff_t>(ids[i] * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  Shape shape = prefix;
  shape.push_back(d);
  std::vector<std::int64_t> kept(ids.begin(), ids.end());
  return Tensor::from_op("embedding", std::move(shape), std::move(out), {table},
                         [table, kept = std::move(kept), d](std::span<const double>,
                                                            std::span<const double> gy) {
                           auto g = table.grad_buffer();
                           for (std::size_t i = 0; i < kept.size(); ++i) {
                             double* row = g.data() + kept[i] * static_cast<std::int64_t>(d);
                             for (std::size_t j = 0; j < d; ++j) row[j] += gy[i * d + j];
                           }
                         });
}

Tensor reshape(const Tensor& x, Shape shape) {
  if (shape_size(shape) != x.size()) {
    throw DimensionError("reshape: cannot view " + shape_to_string(x.shape()) + " as " +
                         shape_to_string(shape));
  }
  std::vector<double> out(x.values().begin(), x.values().end());
  return Tensor::from_op("reshape", std::move(shape), std::move(out), {x},
                         [x](std::span<const double>, std::span<const double> gy) {
                           auto g = x.grad_buffer();
                           for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
                         });
}

Tensor concat_last(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("concat_last: no inputs");
  Shape lead = parts[0].shape();
  lead.pop_back();
  std::size_t width = 0;
  std::vector<std::size_t> widths;
  for (const auto& p : parts) {
    Shape pl = p.shape();
    pl.pop_back();
    if (pl != lead) {
      throw DimensionError("concat_last: " + shape_to_string(p.shape()) + " incompatible with " +
                           shape_to_string(parts[0].shape()));
    }
    widths.push_back(p.shape().back());
    width += p.shape().back();
  }
  const std::size_t rows = shape_size(lead);
  std::vector<double> out(rows * width);
  std::size_t offset = 0;
  for (std::size_t pi = 0; pi < parts.size(); ++pi) {
    const auto pv = parts[pi].values();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(pv.begin() + static_cast<std::ptrdiff_t>(r * widths[pi]), widths[pi],
                  out.begin() + static_cast<std::ptrdiff_t>(r * width + offset));
    }
    offset += widths[pi];
  }
  Shape shape = lead;
  shape.push_back(width);
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return Tensor::from_op("concat_last", std::move(shape), std::move(out), inputs,
                         [inputs, widths, rows, width](std::span<const double>,
                                                       std::span<const double> gy) {
                           std::size_t offset = 0;
                           for (std::size_t pi = 0; pi < inputs.size(); ++pi) {
                             auto g = inputs[pi].grad_buffer();
                             if (!g.empty()) {
                               for (std::size_t r = 0; r < rows; ++r) {
                                 for (std::size_t j = 0; j < widths[pi]; ++j) {
                                   g[r * widths[pi] + j] += gy[r * width + offset + j];
                                 }
                               }
                             }
                             offset += widths[pi];
                           }
                         });
}

Tensor select_position(const Tensor& x, std::size_t t) {
  require_rank("select_position", x, 3);
  const std::size_t batch = x.dim(0);
  const std::size_t len = x.dim(1);
  const std::size_t d = x.dim(2);
  if (t >= len) {
    throw DimensionError("select_position: position " + std::to_string(t) + " outside " +
                         shape_to_string(x.shape()));
  }
  std::vector<double> out(batch * d);
  for (std::size_t b = 0; b < batch; ++b) {
    std::copy_n(x.values().begin() + static_cast<std::ptrdiff_t>((b * len + t) * d), d,
                out.begin() + static_cast<std::ptrdiff_t>(b * d));
  }
  return Tensor::from_op("select_position", Shape{batch, d}, std::move(out), {x},
                         [x, batch, len, d, t](std::span<const double>, std::span<const double> gy) {
                           auto g = x.grad_buffer();
                           for (std::size_t b = 0; b < batch; ++b) {
                             for (std::size_t j = 0; j < d; ++j) g[(b * len + t) * d + j] += gy[b * d + j];
                           }
                         });
}

Tensor stack_positions(std::span<const Tensor> parts) {
  if (parts.empty()) throw DimensionError("stack_positions: no inputs");
  require_rank("stack_positions", parts[0], 2);
  const std::size_t batch = parts[0].dim(0);
  const std::size_t d = parts[0].dim(1);
  const std::size_t n = parts.size();
  for (const auto& p : parts) {
    if (p.shape() != parts[0].shape()) {
      throw DimensionError("stack_positions: " + shape_to_string(p.shape()) + " vs " +
                           shape_to_string(parts[0].shape()));
    }
  }
  std::vector<double> out(batch * n * d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t b = 0; b < batch; ++b) {
      std::copy_n(parts[i].values().begin() + static_cast<std::ptrdiff_t>(b * d), d,
                  out.begin() + static_cast<std::ptrdiff_t>((b * n + i) * d));
    }
  }
  std::vector<Tensor> inputs(parts.begin(), parts.end());
  return Tensor::from_op("stack_positions", Shape{batch, n, d}, std::move(out), inputs,
                         [inputs, batch, n, d](std::span<const double>, std::span<const double> gy) {
                           for (std::size_t i = 0; i < n; ++i) {
                             auto g = inputs[i].grad_buffer();
                             if (g.empty()) continue;
                             for (std::size_t b = 0; b < batch; ++b) {
                               for (std::size_t j = 0; j < d; ++j) g[b * d + j] += gy[(b * n + i) * d + j];
                             }
                           }
                         });
}

Tensor masked_softmax(const Tensor& scores, Mask mask) {
  require_rank("masked_softmax", scores, 2);
  if (mask.size() != scores.size()) {
    throw DimensionError("masked_softmax: mask of " + std::to_string(mask.size()) +
                         " entries for scores " + shape_to_string(scores.shape()));
  }
  const std::size_t batch = scores.dim(0);
  const std::size_t len = scores.dim(1);
  std::vector<double> out(scores.size(), 0.0);
  const auto sv = scores.values();
  for (std::size_t b = 0; b < batch; ++b) {
    double peak = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < len; ++t) {
      if (mask[b * len + t]) peak = std::max(peak, sv[b * len + t]);
    }
    if (peak == -std::numeric_limits<double>::infinity()) {
      throw DataError("masked_softmax: every position of row " + std::to_string(b) + " is masked");
    }
    double total = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      if (!mask[b * len + t]) continue;
      out[b * len + t] = std::exp(sv[b * len + t] - peak);
      total += out[b * len + t];
    }
    for (std::size_t t = 0; t < len; ++t) out[b * len + t] /= total;
  }
  return Tensor::from_op("masked_softmax", scores.shape(), std::move(out), {scores},
                         [scores, batch, len](std::span<const double> y, std::span<const double> gy) {
                           auto g = scores.grad_buffer();
                           for (std::size_t b = 0; b < batch; ++b) {
                             double dot = 0.0;
                             for (std::size_t t = 0; t < len; ++t) dot += gy[b * len + t] * y[b * len + t];
                             for (std::size_t t = 0; t < len; ++t) {
                               g[b * len + t] += y[b * len + t] * (gy[b * len + t] - dot);
                             }
                           }
                         });
}

Tensor weighted_sum(const Tensor& h, const Tensor& weights) {
  require_rank("weighted_sum", h, 3);
  require_rank("weighted_sum", weights, 2);
  const std::size_t batch = h.dim(0);
  const std::size_t len = h.dim(1);
  const std::size_t d = h.dim(2);
  if (weights.dim(0) != batch || weights.dim(1) != len) {
    throw DimensionError("weighted_sum: weights " + shape_to_string(weights.shape()) +
                         " do not match tokens " + shape_to_string(h.shape()));
  }
  std::vector<double> out(batch * d, 0.0);
  const auto hv = h.values();
  const auto wv = weights.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < len; ++t) {
      const double w = wv[b * len + t];
      if (w == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) out[b * d + j] += w * hv[(b * len + t) * d + j];
    }
  }
  return Tensor::from_op(
      "weighted_sum", Shape{batch, d}, std::move(out), {h, weights},
      [h, weights, batch, len, d](std::span<const double>, std::span<const double> gy) {
        auto gh = h.grad_buffer();
        auto gw = weights.grad_buffer();
        const auto hv = h.values();
        const auto wv = weights.values();
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t t = 0; t < len; ++t) {
            const std::size_t row = (b * len + t) * d;
            if (!gh.empty()) {
              for (std::size_t j = 0; j < d; ++j) gh[row + j] += wv[b * len + t] * gy[b * d + j];
            }
            if (!gw.empty()) {
              double acc = 0.0;
              for (std::size_t j = 0; j < d; ++j) acc += hv[row + j] * gy[b * d + j];
              gw[b * len + t] += acc;
            }
          }
        }
      });
}

Tensor sum(const Tensor& x) {
  double total = 0.0;
  for (double v : x.values()) total += v;
  return Tensor::from_op("sum", Shape{1}, {total}, {x},
                         [x](std::span<const double>, std::span<const double> gy) {
                           auto g = x.grad_buffer();
                           for (auto& v : g) v += gy[0];
                         });
}

Tensor mean(const Tensor& x) {
  if (x.size() == 0) throw DimensionError("mean of an empty tensor");
  return scale(sum(x), 1.0 / static_cast<double>(x.size()));
}

Tensor multi_head_attention(const Tensor& q, const Tensor& k, const Tensor& v, Mask key_mask,
                            std::size_t num_heads, std::vector<double>* probabilities) {
  require_rank("multi_head_attention", q, 3);
  require_same_shape("multi_head_attention", q, k);
  require_same_shape("multi_head_attention", q, v);
  const std::size_t batch = q.dim(0);
  const std::size_t len = q.dim(1);
  const std::size_t d = q.dim(2);
  if (num_heads == 0 || d % num_heads != 0) {
    throw DimensionError("multi_head_attention: model width " + std::to_string(d) +
                         " not divisible by " + std::to_string(num_heads) + " heads");
  }
  if (key_mask.size() != batch * len) {
    throw DimensionError("multi_head_attention: mask of " + std::to_string(key_mask.size()) +
                         " entries for " + shape_to_string(q.shape()));
  }
  const std::size_t dh = d / num_heads;
  const double inv_scale = 1.0 / std::sqrt(static_cast<double>(dh));
  auto probs = std::make_shared<std::vector<double>>(batch * num_heads * len * len, 0.0);
  std::vector<double> out(batch * len * d, 0.0);
  const auto qv = q.values();
  const auto kv = k.values();
  const auto vv = v.values();

  for (std::size_t b = 0; b < batch; ++b) {
    bool any_valid = false;
    for (std::size_t t = 0; t < len; ++t) any_valid = any_valid || key_mask[b * len + t];
    if (!any_valid) {
      throw DataError("multi_head_attention: every key of row " + std::to_string(b) + " is masked");
    }
    for (std::size_t h = 0; h < num_heads; ++h) {
      for (std::size_t i = 0; i < len; ++i) {
        double* prow = probs->data() + ((b * num_heads + h) * len + i) * len;
        const double* qi = qv.data() + (b * len + i) * d + h * dh;
        double peak = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < len; ++j) {
          if (!key_mask[b * len + j]) continue;
          const double* kj = kv.data() + (b * len + j) * d + h * dh;
          double s = 0.0;
          for (std::size_t c = 0; c < dh; ++c) s += qi[c] * kj[c];
          prow[j] = s * inv_scale;
          peak = std::max(peak, prow[j]);
        }
        double total = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
          if (!key_mask[b * len + j]) continue;
          prow[j] = std::exp(prow[j] - peak);
          total += prow[j];
        }
        double* oi = out.data() + (b * len + i) * d + h * dh;
        for (std::size_t j = 0; j < len; ++j) {
          if (!key_mask[b * len + j]) continue;
          prow[j] /= total;
          const double* vj = vv.data() + (b * len + j) * d + h * dh;
          for (std::size_t c = 0; c < dh; ++c) oi[c] += prow[j] * vj[c];
        }
      }
    }
  }
  if (probabilities) *probabilities = *probs;

  return Tensor::from_op(
      "multi_head_attention", q.shape(), std::move(out), {q, k, v},
      [q, k, v, probs, batch, len, d, dh, num_heads, inv_scale](std::span<const double>,
                                                                 std::span<const double> gy) {
        auto gq = q.grad_buffer();
        auto gk = k.grad_buffer();
        auto gv = v.grad_buffer();
        const auto qv = q.values();
        const auto kv = k.values();
        const auto vv = v.values();
        std::vector<double> dp(len);
        for (std::size_t b = 0; b < batch; ++b) {
          for (std::size_t h = 0; h < num_heads; ++h) {
            for (std::size_t i = 0; i < len; ++i) {
              const double* prow = probs->data() + ((b * num_heads + h) * len + i) * len;
              const double* go = gy.data() + (b * len + i) * d + h * dh;
              // dP = dO V^T ; dV += P^T dO
              double dot = 0.0;
              for (std::size_t j = 0; j < len; ++j) {
                if (prow[j] == 0.0) {
                  dp[j] = 0.0;
                  continue;
                }
                const std::size_t vrow = (b * len + j) * d + h * dh;
                double acc = 0.0;
                for (std::size_t c = 0; c < dh; ++c) acc += go[c] * vv[vrow + c];
                dp[j] = acc;
                dot += acc * prow[j];
                if (!gv.empty()) {
                  for (std::size_t c = 0; c < dh; ++c) gv[vrow + c] += prow[j] * go[c];
                }
              }
              // dS = P (dP - <dP, P>), scaled back through 1/sqrt(dh)
              const std::size_t qrow = (b * len + i) * d + h * dh;
              for (std::size_t j = 0; j < len; ++j) {
                if (prow[j] == 0.0) continue;
                const double ds = prow[j] * (dp[j] - dot) * inv_scale;
                const std::size_t krow = (b * len + j) * d + h * dh;
                if (!gq.empty()) {
                  for (std::size_t c = 0; c < dh; ++c) gq[qrow + c] += ds * kv[krow + c];
                }
                if (!gk.empty()) {
                  for (std::size_t c = 0; c < dh; ++c) gk[krow + c] += ds * qv[qrow + c];
                }
              }
            }
          }
        }
      });
}

}  // namespace armi
