#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "sllm/matrix.hpp"

namespace sllm {

enum class Activation { kIdentity, kRelu, kTanh };

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::kIdentity: return "identity";
    case Activation::kRelu: return "relu";
    case Activation::kTanh: return "tanh";
  }
  return "identity";
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "identity") return Activation::kIdentity;
  if (s == "relu") return Activation::kRelu;
  if (s == "tanh") return Activation::kTanh;
  throw ConfigError("unknown activation '" + s + "'");
}

// One fully connected layer: act(W x + b).
struct DenseLayer {
  Matrix weight;  // out x in
  Vec bias;       // out
  Activation act = Activation::kIdentity;

  DenseLayer() = default;
  DenseLayer(std::size_t out, std::size_t in, Activation a)
      : weight(out, in), bias(out, 0.0), act(a) {}

  std::size_t in_dim() const { return weight.cols(); }
  std::size_t out_dim() const { return weight.rows(); }
};

inline double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::kIdentity: return z;
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kTanh: return std::tanh(z);
  }
  return z;
}

// Derivative in terms of the pre-activation z.
inline double activation_grad(Activation a, double z) {
  switch (a) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
  }
  return 1.0;
}

inline void dense_forward(const DenseLayer& layer, std::span<const double> input,
                          std::span<double> out) {
  if (input.size() != layer.in_dim())
    throw ShapeError("dense_forward: layer expects input of length " +
                     std::to_string(layer.in_dim()) + ", got " + std::to_string(input.size()));
  matvec(layer.weight, input, out);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = apply_activation(layer.act, out[i] + layer.bias[i]);
}

inline Vec dense_forward(const DenseLayer& layer, std::span<const double> input) {
  Vec out(layer.out_dim());
  dense_forward(layer, input, out);
  return out;
}

// Caches what the backward pass needs: the input and the pre-activation.
struct DenseCache {
  Vec input;
  Vec pre;
};

inline void dense_forward_cached(const DenseLayer& layer, std::span<const double> input,
                                 DenseCache& cache, std::span<double> out) {
  if (input.size() != layer.in_dim())
    throw ShapeError("dense_forward: layer expects input of length " +
                     std::to_string(layer.in_dim()) + ", got " + std::to_string(input.size()));
  cache.input.assign(input.begin(), input.end());
  cache.pre.resize(layer.out_dim());
  matvec(layer.weight, input, cache.pre);
  for (std::size_t i = 0; i < cache.pre.size(); ++i) {
    cache.pre[i] += layer.bias[i];
    out[i] = apply_activation(layer.act, cache.pre[i]);
  }
}

// Accumulates dW/db into `grad` and writes dL/dinput into `dinput`.
inline void dense_backward(const DenseLayer& layer, const DenseCache& cache,
                           std::span<const double> dout, DenseLayer& grad,
                           std::span<double> dinput) {
  Vec dz(layer.out_dim());
  for (std::size_t i = 0; i < dz.size(); ++i)
    dz[i] = dout[i] * activation_grad(layer.act, cache.pre[i]);
  outer_add(grad.weight, dz, cache.input);
  axpy(1.0, dz, grad.bias);
  for (double& v : dinput) v = 0.0;
  matvec_transposed_add(layer.weight, dz, dinput);
}

}  // namespace sllm
