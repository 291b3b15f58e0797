#include "reluwalk/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "reluwalk/error.hpp"
#include "reluwalk/kernels.hpp"
#include "reluwalk/rng.hpp"

namespace reluwalk {
namespace {

void check_layer(const DenseLayer& layer, std::size_t expected_inputs, const std::string& name,
                 bool strict) {
  if (layer.inputs != expected_inputs) {
    throw InputError(name + ": expected " + std::to_string(expected_inputs) + " inputs, got " +
                     std::to_string(layer.inputs));
  }
  if (layer.outputs == 0) throw InputError(name + ": zero outputs");
  if (layer.weights.size() != layer.inputs * layer.outputs) {
    throw InputError(name + ": weight count does not match outputs x inputs");
  }
  if (layer.bias.size() != layer.outputs) throw InputError(name + ": bias length mismatch");
  auto check_entry = [&](double v) {
    if (!std::isfinite(v)) throw InputError(name + ": non-finite entry");
    if (strict && (v < -1.0 || v > 1.0)) throw InputError(name + ": entry outside [-1, 1]");
  };
  std::for_each(layer.weights.begin(), layer.weights.end(), check_entry);
  std::for_each(layer.bias.begin(), layer.bias.end(), check_entry);
}

bool within_unit(const DenseLayer& layer) {
  auto ok = [](double v) { return v >= -1.0 && v <= 1.0; };
  return std::all_of(layer.weights.begin(), layer.weights.end(), ok) &&
         std::all_of(layer.bias.begin(), layer.bias.end(), ok);
}

void check_input(const Network& net, std::span<const double> x) {
  if (x.size() != net.input_dim()) {
    throw InputError("input has length " + std::to_string(x.size()) + ", network expects " +
                     std::to_string(net.input_dim()));
  }
}

DenseLayer random_layer(std::size_t inputs, std::size_t outputs, Rng& rng) {
  DenseLayer layer{inputs, outputs, std::vector<double>(inputs * outputs),
                   std::vector<double>(outputs)};
  for (double& w : layer.weights) w = rng.uniform(-1.0, 1.0);
  for (double& b : layer.bias) b = rng.uniform(-1.0, 1.0);
  return layer;
}

}  // namespace

Network::Network(std::size_t input_dim, std::vector<DenseLayer> hidden, DenseLayer output,
                 bool strict)
    : input_dim_(input_dim), hidden_(std::move(hidden)), output_(std::move(output)) {
  if (input_dim_ == 0) throw InputError("network: input_dim must be positive");
  std::size_t fan_in = input_dim_;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    check_layer(hidden_[l], fan_in, "hidden layer " + std::to_string(l), strict);
    fan_in = hidden_[l].outputs;
    neuron_count_ += hidden_[l].outputs;
  }
  check_layer(output_, fan_in, "output layer", strict);
  if (output_.outputs != 1) throw InputError("output layer must have exactly one unit");
}

std::size_t Network::parameter_count() const noexcept {
  std::size_t count = output_.weights.size() + output_.bias.size();
  for (const auto& layer : hidden_) count += layer.weights.size() + layer.bias.size();
  return count;
}

std::size_t Network::max_width() const noexcept {
  std::size_t w = input_dim_;
  for (const auto& layer : hidden_) w = std::max(w, layer.outputs);
  return w;
}

bool Network::entries_within_unit_bound() const noexcept {
  return std::all_of(hidden_.begin(), hidden_.end(), within_unit) && within_unit(output_);
}

ActivationPattern::ActivationPattern(std::vector<std::vector<std::uint8_t>> layers)
    : layers_(std::move(layers)) {}

ActivationPattern ActivationPattern::from_index(const Network& net, std::uint64_t index) {
  std::vector<std::vector<std::uint8_t>> layers;
  std::size_t bit = 0;
  for (const auto& layer : net.hidden_layers()) {
    std::vector<std::uint8_t> bits(layer.outputs);
    for (auto& b : bits) {
      b = bit < 64 ? static_cast<std::uint8_t>((index >> bit) & 1U) : 0;
      ++bit;
    }
    layers.push_back(std::move(bits));
  }
  return ActivationPattern(std::move(layers));
}

ActivationPattern ActivationPattern::uniform(const Network& net, bool value) {
  std::vector<std::vector<std::uint8_t>> layers;
  for (const auto& layer : net.hidden_layers()) {
    layers.emplace_back(layer.outputs, static_cast<std::uint8_t>(value ? 1 : 0));
  }
  return ActivationPattern(std::move(layers));
}

std::size_t ActivationPattern::bit_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.size();
  return n;
}

std::string ActivationPattern::to_string() const {
  std::string s;
  s.reserve(bit_count());
  for (const auto& l : layers_) {
    for (auto b : l) s.push_back(b ? '1' : '0');
  }
  return s;
}

void ActivationPattern::check_shape(const Network& net) const {
  const auto& hidden = net.hidden_layers();
  bool ok = layers_.size() == hidden.size();
  for (std::size_t l = 0; ok && l < hidden.size(); ++l) ok = layers_[l].size() == hidden[l].outputs;
  if (!ok) throw InputError("activation pattern shape does not match the network");
}

void forward(const Network& net, std::span<const double> x, ForwardTrace& out) {
  check_input(net, x);
  const auto& k = kernels::active();
  const auto& hidden = net.hidden_layers();
  out.preactivations.resize(hidden.size());
  out.activations.resize(hidden.size());
  std::span<const double> input = x;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const DenseLayer& layer = hidden[l];
    auto& g = out.preactivations[l];
    auto& h = out.activations[l];
    g.resize(layer.outputs);
    h.resize(layer.outputs);
    kernels::gemv(k, layer.weights, layer.outputs, layer.inputs, input, layer.bias, g);
    for (std::size_t i = 0; i < g.size(); ++i) h[i] = g[i] > 0.0 ? g[i] : 0.0;
    input = h;
  }
  const DenseLayer& o = net.output_layer();
  out.output = k.dot(o.weights.data(), input.data(), o.inputs) + o.bias[0];
}

ForwardTrace forward(const Network& net, std::span<const double> x) {
  ForwardTrace t;
  forward(net, x, t);
  return t;
}

double evaluate(const Network& net, std::span<const double> x) { return forward(net, x).output; }

ActivationPattern pattern_of(const ForwardTrace& trace) {
  std::vector<std::vector<std::uint8_t>> layers;
  layers.reserve(trace.preactivations.size());
  for (const auto& g : trace.preactivations) {
    std::vector<std::uint8_t> bits(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) bits[i] = g[i] >= 0.0 ? 1 : 0;
    layers.push_back(std::move(bits));
  }
  return ActivationPattern(std::move(layers));
}

ActivationPattern activation_pattern(const Network& net, std::span<const double> x) {
  return pattern_of(forward(net, x));
}

namespace {

// Backward sweep of the masked product; `active(l, i)` reports bit z^l_i.
template <typename ActiveFn>
std::vector<double> masked_product(const Network& net, ActiveFn active) {
  const auto& k = kernels::active();
  const auto& hidden = net.hidden_layers();
  const DenseLayer& o = net.output_layer();
  std::vector<double> v(o.weights.begin(), o.weights.end());
  std::vector<double> next;
  for (std::size_t l = hidden.size(); l-- > 0;) {
    const DenseLayer& layer = hidden[l];
    for (std::size_t i = 0; i < layer.outputs; ++i) {
      if (!active(l, i)) v[i] = 0.0;
    }
    next.resize(layer.inputs);
    kernels::gemv_transposed(k, layer.weights, layer.outputs, layer.inputs, v, next);
    v.swap(next);
  }
  return v;
}

}  // namespace

std::vector<double> gradient(const Network& net, const ForwardTrace& trace) {
  return masked_product(
      net, [&](std::size_t l, std::size_t i) { return trace.preactivations[l][i] >= 0.0; });
}

std::vector<double> gradient(const Network& net, std::span<const double> x) {
  return gradient(net, forward(net, x));
}

std::vector<double> masked_gradient(const Network& net, const ActivationPattern& pattern) {
  pattern.check_shape(net);
  return masked_product(net, [&](std::size_t l, std::size_t i) { return pattern.bit(l, i); });
}

Network random_network(std::size_t input_dim, std::size_t depth, std::size_t width,
                       std::uint64_t seed) {
  if (input_dim == 0 || depth == 0 || width == 0) {
    throw InputError("random_network: n0, depth and width must be >= 1");
  }
  Rng rng(seed);
  std::vector<DenseLayer> hidden;
  hidden.reserve(depth);
  std::size_t fan_in = input_dim;
  for (std::size_t l = 0; l < depth; ++l) {
    hidden.push_back(random_layer(fan_in, width, rng));
    fan_in = width;
  }
  DenseLayer out = random_layer(fan_in, 1, rng);
  return Network(input_dim, std::move(hidden), std::move(out), /*strict=*/true);
}

Network constant_network(std::size_t input_dim, std::size_t depth, std::size_t width,
                         double output_bias) {
  std::vector<DenseLayer> hidden;
  std::size_t fan_in = input_dim;
  for (std::size_t l = 0; l < depth; ++l) {
    hidden.push_back({fan_in, width, std::vector<double>(fan_in * width, 0.0),
                      std::vector<double>(width, 0.0)});
    fan_in = width;
  }
  DenseLayer out{fan_in, 1, std::vector<double>(fan_in, 0.0), {output_bias}};
  return Network(input_dim, std::move(hidden), std::move(out));
}

}  // namespace reluwalk
