// Minimal neural-network core: dense and 1D-convolution layers, ELU/sigmoid
// activations, inverted dropout, BCE loss, plain SGD, and a finite-difference
// gradient checker. Shared by the embedding trainer and the section filter.
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "arix/errors.hpp"

namespace arix::nn {

enum class Activation { linear, elu, sigmoid };
enum class LayerKind { dense, conv1d, global_max_pool };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::linear: return "linear";
    case Activation::elu: return "elu";
    case Activation::sigmoid: return "sigmoid";
  }
  return "?";
}

inline const char* to_string(LayerKind k) {
  switch (k) {
    case LayerKind::dense: return "dense";
    case LayerKind::conv1d: return "conv1d";
    case LayerKind::global_max_pool: return "global_max_pool";
  }
  return "?";
}

inline Activation activation_from_string(const std::string& s) {
  if (s == "linear") return Activation::linear;
  if (s == "elu") return Activation::elu;
  if (s == "sigmoid") return Activation::sigmoid;
  throw SpecError("unknown activation: " + s);
}

inline LayerKind layer_kind_from_string(const std::string& s) {
  if (s == "dense") return LayerKind::dense;
  if (s == "conv1d") return LayerKind::conv1d;
  if (s == "global_max_pool") return LayerKind::global_max_pool;
  throw SpecError("unknown layer kind: " + s);
}

// Row-major tensor; a plain feature vector is shape (1, n). For sequences,
// rows = positions and cols = channels.
struct Tensor {
  std::size_t rows = 0, cols = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(std::size_t r, std::size_t c, double fill = 0.0) : rows(r), cols(c), data(r * c, fill) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  std::size_t in = 0;      // dense: input features; conv1d: input channels
  std::size_t out = 0;     // dense: output features; conv1d: filters
  std::size_t kernel = 0;  // conv1d only
  Activation activation = Activation::linear;
  double dropout = 0.0;
};

inline LayerSpec dense(std::size_t in, std::size_t out, Activation act = Activation::linear,
                       double dropout = 0.0) {
  return {LayerKind::dense, in, out, 0, act, dropout};
}

inline LayerSpec conv1d(std::size_t in_channels, std::size_t filters, std::size_t kernel,
                        Activation act = Activation::linear, double dropout = 0.0) {
  return {LayerKind::conv1d, in_channels, filters, kernel, act, dropout};
}

inline LayerSpec global_max_pool() {
  return {LayerKind::global_max_pool, 0, 0, 0, Activation::linear, 0.0};
}

struct Layer {
  LayerSpec spec;
  std::vector<double> weights;  // dense: out*in row-major; conv1d: filters*(kernel*in)
  std::vector<double> bias;     // size out / filters
};

struct Network {
  std::vector<Layer> layers;
  std::uint64_t seed = 0;

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += l.weights.size() + l.bias.size();
    return n;
  }
};

// He normal init (weights ~ N(0, sqrt(2/fan_in)), biases zero), deterministic
// per seed. Validates that adjacent layer dimensions chain up; conv layers may
// only be bridged to dense ones through a global max pool.
inline Network init_network(const std::vector<LayerSpec>& specs, std::uint64_t seed) {
  if (specs.empty()) throw SpecError("network needs at least one layer");
  Network net;
  net.seed = seed;
  std::mt19937_64 rng(seed);

  bool sequence_domain = specs.front().kind == LayerKind::conv1d;
  std::size_t width = specs.front().in;

  for (const auto& spec : specs) {
    if (spec.dropout < 0.0 || spec.dropout >= 1.0)
      throw SpecError("dropout rate must be in [0,1)");
    Layer layer;
    layer.spec = spec;
    switch (spec.kind) {
      case LayerKind::dense: {
        if (sequence_domain)
          throw SpecError("dense layer cannot follow conv output without a pool");
        if (spec.in != width) throw SpecError("dense layer input width mismatch");
        if (spec.out == 0) throw SpecError("dense layer needs out > 0");
        const double sd = std::sqrt(2.0 / static_cast<double>(spec.in));
        std::normal_distribution<double> dist(0.0, sd);
        layer.weights.resize(spec.out * spec.in);
        for (auto& w : layer.weights) w = dist(rng);
        layer.bias.assign(spec.out, 0.0);
        width = spec.out;
        break;
      }
      case LayerKind::conv1d: {
        if (!sequence_domain) throw SpecError("conv1d layer requires sequence input");
        if (spec.in != width) throw SpecError("conv1d input channel mismatch");
        if (spec.out == 0 || spec.kernel == 0) throw SpecError("conv1d needs filters and kernel > 0");
        const std::size_t fan_in = spec.kernel * spec.in;
        const double sd = std::sqrt(2.0 / static_cast<double>(fan_in));
        std::normal_distribution<double> dist(0.0, sd);
        layer.weights.resize(spec.out * fan_in);
        for (auto& w : layer.weights) w = dist(rng);
        layer.bias.assign(spec.out, 0.0);
        width = spec.out;
        break;
      }
      case LayerKind::global_max_pool: {
        if (!sequence_domain) throw SpecError("global_max_pool requires sequence input");
        sequence_domain = false;
        break;
      }
    }
    net.layers.push_back(std::move(layer));
  }
  return net;
}

namespace detail {

inline double elu(double x) { return x >= 0.0 ? x : std::expm1(x); }
inline double elu_grad(double z, double a) { return z >= 0.0 ? 1.0 : a + 1.0; }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline void apply_activation(Activation act, const Tensor& z, Tensor& a) {
  a = z;
  switch (act) {
    case Activation::linear: break;
    case Activation::elu:
      for (auto& v : a.data) v = elu(v);
      break;
    case Activation::sigmoid:
      for (auto& v : a.data) v = sigmoid(v);
      break;
  }
}

}  // namespace detail

struct LayerCache {
  Tensor input;              // activation entering the layer
  Tensor z;                  // pre-activation
  Tensor a;                  // post-activation, post-dropout (layer output)
  std::vector<double> drop;  // per-unit multiplier (1/(1-p) kept, 0 dropped)
  std::vector<std::size_t> argmax;  // global_max_pool winners per channel
};

struct ForwardPass {
  std::vector<LayerCache> caches;
  const Tensor& output() const { return caches.back().a; }
};

inline ForwardPass forward_cached(const Network& net, const Tensor& input, bool training,
                                  std::mt19937_64* rng = nullptr) {
  if (training && rng == nullptr) throw SpecError("training forward needs an RNG for dropout");
  ForwardPass fp;
  fp.caches.resize(net.layers.size());
  const Tensor* x = &input;

  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& layer = net.layers[li];
    LayerCache& cache = fp.caches[li];
    cache.input = *x;
    const LayerSpec& spec = layer.spec;

    switch (spec.kind) {
      case LayerKind::dense: {
        if (x->rows != 1 || x->cols != spec.in)
          throw ShapeError("dense layer expects shape (1, in)");
        cache.z = Tensor(1, spec.out);
        for (std::size_t o = 0; o < spec.out; ++o) {
          double s = layer.bias[o];
          const double* w = layer.weights.data() + o * spec.in;
          for (std::size_t i = 0; i < spec.in; ++i) s += w[i] * x->data[i];
          cache.z.data[o] = s;
        }
        break;
      }
      case LayerKind::conv1d: {
        if (x->cols != spec.in) throw ShapeError("conv1d channel mismatch");
        if (x->rows < spec.kernel) throw ShapeError("conv1d input shorter than kernel");
        const std::size_t T = x->rows - spec.kernel + 1;
        cache.z = Tensor(T, spec.out);
        const std::size_t K = spec.kernel, C = spec.in;
        for (std::size_t t = 0; t < T; ++t) {
          const double* xt = x->data.data() + t * C;
          for (std::size_t f = 0; f < spec.out; ++f) {
            const double* w = layer.weights.data() + f * K * C;
            double s = layer.bias[f];
            for (std::size_t j = 0; j < K * C; ++j) s += w[j] * xt[j];
            cache.z.at(t, f) = s;
          }
        }
        break;
      }
      case LayerKind::global_max_pool: {
        const std::size_t C = x->cols;
        cache.z = Tensor(1, C);
        cache.argmax.assign(C, 0);
        for (std::size_t c = 0; c < C; ++c) {
          double best = x->at(0, c);
          std::size_t bt = 0;
          for (std::size_t t = 1; t < x->rows; ++t)
            if (x->at(t, c) > best) { best = x->at(t, c); bt = t; }
          cache.z.data[c] = best;
          cache.argmax[c] = bt;
        }
        break;
      }
    }

    detail::apply_activation(spec.activation, cache.z, cache.a);

    if (training && spec.dropout > 0.0) {
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      const double keep = 1.0 - spec.dropout;
      cache.drop.resize(cache.a.data.size());
      for (std::size_t i = 0; i < cache.a.data.size(); ++i) {
        const bool kept = uni(*rng) < keep;
        cache.drop[i] = kept ? 1.0 / keep : 0.0;
        cache.a.data[i] *= cache.drop[i];
      }
    }
    x = &cache.a;
  }
  return fp;
}

inline Tensor forward(const Network& net, const Tensor& input, bool training = false,
                      std::mt19937_64* rng = nullptr) {
  return forward_cached(net, input, training, rng).output();
}

inline double loss_bce(double pred, int label) {
  constexpr double eps = 1e-7;
  const double p = std::min(1.0 - eps, std::max(eps, pred));
  return -(label * std::log(p) + (1 - label) * std::log(1.0 - p));
}

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> bias;
};

// Backward pass from dL/d(output). Dropout masks recorded in the forward pass
// are replayed, so call with the caches of the same forward.
inline Gradients backward(const Network& net, const ForwardPass& fp, Tensor grad_out) {
  Gradients g;
  g.weights.resize(net.layers.size());
  g.bias.resize(net.layers.size());

  Tensor grad_a = std::move(grad_out);  // dL/d(layer output)
  for (std::size_t li = net.layers.size(); li-- > 0;) {
    const Layer& layer = net.layers[li];
    const LayerCache& cache = fp.caches[li];
    const LayerSpec& spec = layer.spec;

    if (!cache.drop.empty())
      for (std::size_t i = 0; i < grad_a.data.size(); ++i) grad_a.data[i] *= cache.drop[i];

    // activation backward: dL/dz
    Tensor grad_z = grad_a;
    switch (spec.activation) {
      case Activation::linear: break;
      case Activation::elu: {
        // post-dropout a was scaled; use z for the branch and recompute elu(z)
        for (std::size_t i = 0; i < grad_z.data.size(); ++i) {
          const double z = cache.z.data[i];
          grad_z.data[i] *= detail::elu_grad(z, detail::elu(z));
        }
        break;
      }
      case Activation::sigmoid: {
        for (std::size_t i = 0; i < grad_z.data.size(); ++i) {
          const double s = detail::sigmoid(cache.z.data[i]);
          grad_z.data[i] *= s * (1.0 - s);
        }
        break;
      }
    }

    const Tensor& x = cache.input;
    Tensor grad_x(x.rows, x.cols);
    switch (spec.kind) {
      case LayerKind::dense: {
        g.weights[li].assign(layer.weights.size(), 0.0);
        g.bias[li].assign(layer.bias.size(), 0.0);
        for (std::size_t o = 0; o < spec.out; ++o) {
          const double gz = grad_z.data[o];
          g.bias[li][o] += gz;
          double* gw = g.weights[li].data() + o * spec.in;
          const double* w = layer.weights.data() + o * spec.in;
          for (std::size_t i = 0; i < spec.in; ++i) {
            gw[i] += gz * x.data[i];
            grad_x.data[i] += gz * w[i];
          }
        }
        break;
      }
      case LayerKind::conv1d: {
        g.weights[li].assign(layer.weights.size(), 0.0);
        g.bias[li].assign(layer.bias.size(), 0.0);
        const std::size_t K = spec.kernel, C = spec.in;
        const std::size_t T = grad_z.rows;
        for (std::size_t t = 0; t < T; ++t) {
          const double* xt = x.data.data() + t * C;
          double* gxt = grad_x.data.data() + t * C;
          for (std::size_t f = 0; f < spec.out; ++f) {
            const double gz = grad_z.at(t, f);
            if (gz == 0.0) continue;
            g.bias[li][f] += gz;
            double* gw = g.weights[li].data() + f * K * C;
            const double* w = layer.weights.data() + f * K * C;
            for (std::size_t j = 0; j < K * C; ++j) {
              gw[j] += gz * xt[j];
              gxt[j] += gz * w[j];
            }
          }
        }
        break;
      }
      case LayerKind::global_max_pool: {
        g.weights[li].clear();
        g.bias[li].clear();
        for (std::size_t c = 0; c < grad_z.cols; ++c)
          grad_x.at(cache.argmax[c], c) += grad_z.data[c];
        break;
      }
    }
    grad_a = std::move(grad_x);
  }
  return g;
}

// Backward pass seeded with the BCE loss derivative (single sigmoid output).
inline Gradients backward_bce(const Network& net, const ForwardPass& fp, int label) {
  const Tensor& out = fp.output();
  if (out.data.size() != 1) throw ShapeError("BCE backward expects a single output");
  constexpr double eps = 1e-7;
  const double p = std::min(1.0 - eps, std::max(eps, out.data[0]));
  Tensor grad(1, 1);
  grad.data[0] = (p - label) / (p * (1.0 - p));
  return backward(net, fp, std::move(grad));
}

inline void sgd_step(Network& net, const Gradients& g, double learning_rate) {
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto& layer = net.layers[li];
    if (g.weights[li].size() != layer.weights.size() || g.bias[li].size() != layer.bias.size())
      throw ShapeError("gradient shape mismatch in sgd_step");
    for (std::size_t i = 0; i < layer.weights.size(); ++i)
      layer.weights[i] -= learning_rate * g.weights[li][i];
    for (std::size_t i = 0; i < layer.bias.size(); ++i)
      layer.bias[i] -= learning_rate * g.bias[li][i];
  }
}

// Compares backprop against central finite differences over every parameter.
// Dropout is disabled (inference-mode forwards) so the check is deterministic.
inline double gradient_check(Network net, const Tensor& input, int label, double epsilon = 1e-5) {
  auto loss_at = [&](const Network& n) {
    const Tensor out = forward(n, input, false);
    return loss_bce(out.data[0], label);
  };

  const ForwardPass fp = forward_cached(net, input, false);
  const Gradients g = backward_bce(net, fp, label);

  double max_rel = 0.0;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto check_param = [&](double& p, double g_bp) {
      const double orig = p;
      p = orig + epsilon;
      const double lp = loss_at(net);
      p = orig - epsilon;
      const double lm = loss_at(net);
      p = orig;
      const double g_fd = (lp - lm) / (2.0 * epsilon);
      const double denom = std::max({std::abs(g_bp), std::abs(g_fd), 1e-8});
      max_rel = std::max(max_rel, std::abs(g_bp - g_fd) / denom);
    };
    for (std::size_t i = 0; i < net.layers[li].weights.size(); ++i)
      check_param(net.layers[li].weights[i], g.weights[li][i]);
    for (std::size_t i = 0; i < net.layers[li].bias.size(); ++i)
      check_param(net.layers[li].bias[i], g.bias[li][i]);
  }
  return max_rel;
}

// ---------------------------------------------------------------------------
// serialization

inline nlohmann::json network_to_json(const Network& net) {
  nlohmann::json j;
  j["format"] = "arix-network";
  j["version"] = 1;
  j["seed"] = net.seed;
  j["layers"] = nlohmann::json::array();
  for (const auto& l : net.layers) {
    nlohmann::json lj;
    lj["kind"] = to_string(l.spec.kind);
    lj["in"] = l.spec.in;
    lj["out"] = l.spec.out;
    lj["kernel"] = l.spec.kernel;
    lj["activation"] = to_string(l.spec.activation);
    lj["dropout"] = l.spec.dropout;
    lj["weights"] = l.weights;
    lj["bias"] = l.bias;
    j["layers"].push_back(std::move(lj));
  }
  return j;
}

inline Network network_from_json(const nlohmann::json& j) {
  if (!j.contains("version") || j.value("format", "") != "arix-network")
    throw IoError("not an arix network file");
  Network net;
  net.seed = j.value("seed", 0ULL);
  for (const auto& lj : j.at("layers")) {
    Layer l;
    l.spec.kind = layer_kind_from_string(lj.at("kind").get<std::string>());
    l.spec.in = lj.at("in").get<std::size_t>();
    l.spec.out = lj.at("out").get<std::size_t>();
    l.spec.kernel = lj.at("kernel").get<std::size_t>();
    l.spec.activation = activation_from_string(lj.at("activation").get<std::string>());
    l.spec.dropout = lj.at("dropout").get<double>();
    l.weights = lj.at("weights").get<std::vector<double>>();
    l.bias = lj.at("bias").get<std::vector<double>>();
    net.layers.push_back(std::move(l));
  }
  return net;
}

}  // namespace arix::nn
