// SPDX-License-Identifier: Apache-2.0
#include "armi/model/attention_pool.hpp"

#include "armi/errors.hpp"
#include "armi/model/encoder.hpp"

namespace armi::model {
namespace {

std::vector<double> normal_values(std::size_t n, Rng& rng) {
  std::vector<double> values(n);
  for (auto& v : values) v = rng.normal(0.0, kInitStddev);
  return values;
}

}  // namespace

AttentionPool AttentionPool::create(ParameterSet& params, const std::string& prefix, std::size_t d,
                                    std::size_t d_attn, Rng& rng) {
  AttentionPool pool;
  pool.projection = params.add(prefix + ".projection.weight", {d, d_attn}, normal_values(d * d_attn, rng));
  pool.bias = params.add(prefix + ".projection.bias", {d_attn}, std::vector<double>(d_attn, 0.0));
  pool.context = params.add(prefix + ".context", {d_attn, 1}, normal_values(d_attn, rng));
  return pool;
}

PoolOutput attention_pool(const AttentionPool& pool, const Tensor& tokens, Mask mask) {
  if (tokens.rank() != 3) {
    throw DimensionError("attention_pool: tokens must be [B x T x d], got " +
                         shape_to_string(tokens.shape()));
  }
  const std::size_t B = tokens.dim(0);
  const std::size_t T = tokens.dim(1);
  Tensor projected = tanh(add_bias(matmul(tokens, pool.projection), pool.bias));
  Tensor scores = reshape(matmul(projected, pool.context), {B, T});
  Tensor weights = masked_softmax(scores, mask);
  return {weighted_sum(tokens, weights), weights};
}

Linear Linear::create(ParameterSet& params, const std::string& prefix, std::size_t in,
                      std::size_t out, Rng& rng) {
  Linear layer;
  layer.weight = params.add(prefix + ".weight", {in, out}, normal_values(in * out, rng));
  layer.bias = params.add(prefix + ".bias", {out}, std::vector<double>(out, 0.0));
  return layer;
}

Tensor Linear::operator()(const Tensor& x) const { return add_bias(matmul(x, weight), bias); }

}  // namespace armi::model
