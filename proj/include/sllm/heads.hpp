#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <vector>

#include "sllm/adam.hpp"
#include "sllm/dataset.hpp"
#include "sllm/dense.hpp"
#include "sllm/metrics.hpp"
#include "sllm/rng.hpp"

namespace sllm {

struct HeadConfig {
  std::vector<std::size_t> hidden;  // relu hidden sizes; empty = linear head
  std::size_t epochs = 400;
  double lr = 1e-2;
  std::size_t patience = 30;
  std::uint64_t seed = 0;
};

// Task head over frozen inputs: relu hidden layers, linear output.
struct HeadModel {
  std::vector<DenseLayer> layers;
  LabelKind task = LabelKind::kClassification;
  std::size_t n_outputs = 0;  // C (classification) or L (regression)

  std::size_t input_dim() const { return layers.front().in_dim(); }
};

inline Vec head_forward(const HeadModel& head, std::span<const double> input) {
  if (input.size() != head.input_dim())
    throw ShapeError("head: input has length " + std::to_string(input.size()) + ", expected " +
                     std::to_string(head.input_dim()));
  Vec cur(input.begin(), input.end());
  for (const auto& layer : head.layers) cur = dense_forward(layer, cur);
  return cur;
}

// Classification: argmax with ties broken toward the lowest class index.
inline int predict_class(const HeadModel& head, std::span<const double> input) {
  const Vec out = head_forward(head, input);
  std::size_t best = 0;
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i] > out[best]) best = i;
  return static_cast<int>(best);
}

// Regression: raw outputs, no clipping.
inline Vec predict_values(const HeadModel& head, std::span<const double> input) {
  return head_forward(head, input);
}

namespace detail {

struct HeadGrads {
  std::vector<DenseLayer> layers;
};

inline void head_zero(const HeadModel& head, HeadGrads& g) {
  g.layers = head.layers;
  for (auto& layer : g.layers) {
    layer.weight.fill(0.0);
    for (auto& b : layer.bias) b = 0.0;
  }
}

inline std::size_t head_param_count(const HeadModel& head) {
  std::size_t n = 0;
  for (const auto& l : head.layers) n += l.weight.size() + l.bias.size();
  return n;
}

inline void head_copy_flat(const std::vector<DenseLayer>& layers, std::span<double> flat) {
  std::size_t off = 0;
  for (const auto& l : layers) {
    std::copy(l.weight.data(), l.weight.data() + l.weight.size(), flat.begin() + static_cast<std::ptrdiff_t>(off));
    off += l.weight.size();
    std::copy(l.bias.begin(), l.bias.end(), flat.begin() + static_cast<std::ptrdiff_t>(off));
    off += l.bias.size();
  }
}

inline void head_copy_back(std::vector<DenseLayer>& layers, std::span<const double> flat) {
  std::size_t off = 0;
  for (auto& l : layers) {
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + l.weight.size()), l.weight.data());
    off += l.weight.size();
    std::copy(flat.begin() + static_cast<std::ptrdiff_t>(off),
              flat.begin() + static_cast<std::ptrdiff_t>(off + l.bias.size()), l.bias.begin());
    off += l.bias.size();
  }
}

}  // namespace detail

// Labels for the ids the head trains and validates on.
struct HeadTargets {
  LabelKind task = LabelKind::kClassification;
  std::size_t n_outputs = 0;
  std::vector<int> class_of_row;  // per dataset row; -1 for unlabeled
  Matrix values_of_row;           // per dataset row, regression

  static HeadTargets from_dataset(const SocialDataset& ds) {
    HeadTargets t;
    t.task = ds.label_spec.kind;
    t.n_outputs = t.task == LabelKind::kClassification ? ds.label_spec.n_classes
                                                       : ds.label_spec.n_outputs;
    t.class_of_row.assign(ds.users.size(), -1);
    if (t.task == LabelKind::kRegression) t.values_of_row = Matrix(ds.users.size(), t.n_outputs);
    for (std::size_t i = 0; i < ds.users.size(); ++i) {
      if (!ds.users[i].label.has_value()) continue;
      if (t.task == LabelKind::kClassification) {
        t.class_of_row[i] = ds.users[i].label->class_index;
      } else {
        t.class_of_row[i] = 0;  // marks the row as labeled
        for (std::size_t l = 0; l < t.n_outputs; ++l)
          t.values_of_row(i, l) = ds.users[i].label->values[l];
      }
    }
    return t;
  }
};

// Validation metric (higher is better): Macro-F1 or mean Pearson.
inline double head_val_metric(const HeadModel& head, const Matrix& inputs,
                              const HeadTargets& targets, std::span<const std::size_t> ids) {
  if (targets.task == LabelKind::kClassification) {
    std::vector<int> pred, actual;
    for (std::size_t id : ids) {
      pred.push_back(predict_class(head, inputs.row(id)));
      actual.push_back(targets.class_of_row[id]);
    }
    return macro_f1(pred, actual, targets.n_outputs);
  }
  Matrix pred(ids.size(), targets.n_outputs), actual(ids.size(), targets.n_outputs);
  for (std::size_t r = 0; r < ids.size(); ++r) {
    const Vec out = predict_values(head, inputs.row(ids[r]));
    for (std::size_t l = 0; l < targets.n_outputs; ++l) {
      pred(r, l) = out[l];
      actual(r, l) = targets.values_of_row(ids[r], l);
    }
  }
  return mean_pearson(pred, actual);
}

// Full-batch training with softmax cross-entropy (classification) or mean
// squared error (regression), early stopping and model selection on the
// validation metric.
inline HeadModel train_head(const Matrix& inputs, const HeadTargets& targets,
                            std::span<const std::size_t> train_ids,
                            std::span<const std::size_t> val_ids, const HeadConfig& cfg) {
  if (train_ids.empty()) throw Error("train_head: empty training set");
  for (std::size_t id : train_ids)
    if (targets.class_of_row[id] < 0) throw Error("train_head: unlabeled user in training ids");
  if (targets.task == LabelKind::kClassification) {
    std::set<int> classes;
    for (std::size_t id : train_ids) classes.insert(targets.class_of_row[id]);
    if (classes.size() < 2) throw Error("train_head: training labels contain a single class");
  }
  if (targets.n_outputs == 0) throw Error("train_head: no outputs configured");

  HeadModel head;
  head.task = targets.task;
  head.n_outputs = targets.n_outputs;
  {
    Rng rng(derive_seed(cfg.seed, "head-init"));
    std::size_t in = inputs.cols();
    for (std::size_t h : cfg.hidden) {
      DenseLayer layer(h, in, Activation::kRelu);
      const double bound = std::sqrt(6.0 / static_cast<double>(in + h));
      for (std::size_t i = 0; i < layer.weight.size(); ++i)
        layer.weight.data()[i] = rng.uniform(-bound, bound);
      head.layers.push_back(std::move(layer));
      in = h;
    }
    DenseLayer out(targets.n_outputs, in, Activation::kIdentity);
    const double bound = std::sqrt(6.0 / static_cast<double>(in + targets.n_outputs));
    for (std::size_t i = 0; i < out.weight.size(); ++i)
      out.weight.data()[i] = rng.uniform(-bound, bound);
    head.layers.push_back(std::move(out));
  }

  AdamState adam(detail::head_param_count(head), cfg.lr);
  Vec flat(adam.m.size()), flat_g(adam.m.size());
  detail::HeadGrads grads;

  HeadModel best = head;
  double best_metric = -std::numeric_limits<double>::infinity();
  std::size_t strikes = 0;
  const double inv_n = 1.0 / static_cast<double>(train_ids.size());

  std::vector<DenseCache> caches(head.layers.size());
  std::vector<Vec> activations(head.layers.size() + 1);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    detail::head_zero(head, grads);
    for (std::size_t id : train_ids) {
      activations[0].assign(inputs.row(id).begin(), inputs.row(id).end());
      for (std::size_t l = 0; l < head.layers.size(); ++l) {
        activations[l + 1].resize(head.layers[l].out_dim());
        dense_forward_cached(head.layers[l], activations[l], caches[l], activations[l + 1]);
      }
      Vec dout(targets.n_outputs);
      const Vec& out = activations.back();
      if (targets.task == LabelKind::kClassification) {
        double mx = out[0];
        for (double v : out) mx = std::max(mx, v);
        double z = 0.0;
        for (double v : out) z += std::exp(v - mx);
        const auto target = static_cast<std::size_t>(targets.class_of_row[id]);
        for (std::size_t c = 0; c < targets.n_outputs; ++c)
          dout[c] = (std::exp(out[c] - mx) / z - (c == target ? 1.0 : 0.0)) * inv_n;
      } else {
        const double scale = 2.0 * inv_n / static_cast<double>(targets.n_outputs);
        for (std::size_t l = 0; l < targets.n_outputs; ++l)
          dout[l] = scale * (out[l] - targets.values_of_row(id, l));
      }
      Vec dcur = dout;
      for (std::size_t l = head.layers.size(); l-- > 0;) {
        Vec dprev(head.layers[l].in_dim());
        dense_backward(head.layers[l], caches[l], dcur, grads.layers[l], dprev);
        dcur = std::move(dprev);
      }
    }
    detail::head_copy_flat(head.layers, flat);
    detail::head_copy_flat(grads.layers, flat_g);
    adam_step(flat, flat_g, adam);
    detail::head_copy_back(head.layers, flat);

    if (!val_ids.empty()) {
      const double metric = head_val_metric(head, inputs, targets, val_ids);
      if (metric > best_metric) {
        best_metric = metric;
        best = head;
        strikes = 0;
      } else {
        strikes += 1;
        if (strikes > cfg.patience) break;
      }
    }
  }
  return val_ids.empty() ? head : best;
}

}  // namespace sllm
