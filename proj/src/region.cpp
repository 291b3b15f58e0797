#include "reluwalk/region.hpp"

#include <algorithm>
#include <cmath>

#include "reluwalk/error.hpp"
#include "reluwalk/kernels.hpp"

namespace reluwalk {

double AffineMap::evaluate(std::span<const double> x) const noexcept {
  return kernels::dot(slope, x) + offset;
}

AffineMap region_affine(const Network& net, const ActivationPattern& pattern) {
  pattern.check_shape(net);
  const auto& k = kernels::active();
  // The offset is the masked network evaluated at the origin.
  std::vector<double> h;
  std::vector<double> g;
  std::span<const double> input;
  std::vector<double> origin(net.input_dim(), 0.0);
  input = origin;
  const auto& hidden = net.hidden_layers();
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const DenseLayer& layer = hidden[l];
    g.resize(layer.outputs);
    kernels::gemv(k, layer.weights, layer.outputs, layer.inputs, input, layer.bias, g);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!pattern.bit(l, i)) g[i] = 0.0;
    }
    h.swap(g);
    input = h;
  }
  const DenseLayer& o = net.output_layer();
  AffineMap map;
  map.offset = k.dot(o.weights.data(), input.data(), o.inputs) + o.bias[0];
  map.slope = masked_gradient(net, pattern);
  return map;
}

std::vector<NeuronAffine> neuron_affines(const Network& net, const ActivationPattern& pattern) {
  pattern.check_shape(net);
  const auto& k = kernels::active();
  const std::size_t n0 = net.input_dim();
  const auto& hidden = net.hidden_layers();
  std::vector<NeuronAffine> result;
  result.reserve(net.hidden_neuron_count());

  // Masked affine images of the previous layer: rows of `prev` are h^{l-1}_k as
  // functions of x. The input layer is the identity.
  std::vector<NeuronAffine> prev(n0);
  for (std::size_t j = 0; j < n0; ++j) {
    prev[j].normal.assign(n0, 0.0);
    prev[j].normal[j] = 1.0;
  }
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const DenseLayer& layer = hidden[l];
    std::vector<NeuronAffine> current(layer.outputs);
    for (std::size_t i = 0; i < layer.outputs; ++i) {
      NeuronAffine& a = current[i];
      a.normal.assign(n0, 0.0);
      a.offset = layer.bias[i];
      for (std::size_t kk = 0; kk < layer.inputs; ++kk) {
        const double w = layer.weight(i, kk);
        if (w == 0.0) continue;
        k.axpy(w, prev[kk].normal.data(), a.normal.data(), n0);
        a.offset += w * prev[kk].offset;
      }
    }
    result.insert(result.end(), current.begin(), current.end());
    for (std::size_t i = 0; i < layer.outputs; ++i) {
      if (!pattern.bit(l, i)) {
        std::fill(current[i].normal.begin(), current[i].normal.end(), 0.0);
        current[i].offset = 0.0;
      }
    }
    prev = std::move(current);
  }
  return result;
}

std::vector<Halfspace> region_halfspaces(const Network& net, const ActivationPattern& pattern) {
  auto affines = neuron_affines(net, pattern);
  std::vector<Halfspace> halfspaces;
  halfspaces.reserve(affines.size());
  std::size_t idx = 0;
  for (std::size_t l = 0; l < pattern.layers().size(); ++l) {
    for (std::size_t i = 0; i < pattern.layer(l).size(); ++i, ++idx) {
      halfspaces.push_back({std::move(affines[idx].normal), affines[idx].offset,
                            pattern.bit(l, i) ? Sense::kGreaterEqual : Sense::kLessEqual});
    }
  }
  return halfspaces;
}

std::vector<double> tangent_preactivations(const Network& net, const ForwardTrace& trace,
                                           std::span<const double> direction) {
  const auto& k = kernels::active();
  const auto& hidden = net.hidden_layers();
  std::vector<double> flat;
  flat.reserve(net.hidden_neuron_count());
  std::vector<double> input(direction.begin(), direction.end());
  std::vector<double> dg;
  for (std::size_t l = 0; l < hidden.size(); ++l) {
    const DenseLayer& layer = hidden[l];
    dg.assign(layer.outputs, 0.0);
    for (std::size_t i = 0; i < layer.outputs; ++i) dg[i] = k.dot(layer.row(i).data(), input.data(), layer.inputs);
    flat.insert(flat.end(), dg.begin(), dg.end());
    for (std::size_t i = 0; i < layer.outputs; ++i) {
      if (!(trace.preactivations[l][i] >= 0.0)) dg[i] = 0.0;
    }
    input.swap(dg);
  }
  return flat;
}

RatioTestResult ratio_test(const Network& net, std::span<const double> x, const ForwardTrace& trace,
                           std::vector<double> grad, DeltaMode mode) {
  RatioTestResult result;
  result.gradient_norm = std::sqrt(kernels::squared_norm(grad));

  std::vector<double> delta;
  if (mode == DeltaMode::kRegionLinear) {
    delta = tangent_preactivations(net, trace, grad);
  } else {
    std::vector<double> stepped(x.begin(), x.end());
    kernels::axpy(1.0, grad, stepped);
    const ForwardTrace ahead = forward(net, stepped);
    delta.reserve(net.hidden_neuron_count());
    for (std::size_t l = 0; l < ahead.preactivations.size(); ++l) {
      for (std::size_t i = 0; i < ahead.preactivations[l].size(); ++i) {
        delta.push_back(ahead.preactivations[l][i] - trace.preactivations[l][i]);
      }
    }
  }

  std::size_t idx = 0;
  for (const auto& g_layer : trace.preactivations) {
    for (double g : g_layer) {
      const double dg = delta[idx];
      if (std::abs(dg) >= kParallelDeltaTolerance) {
        const double ratio = g == 0.0 ? 0.0 : -g / dg;
        if (ratio >= 0.0 && ratio < result.u) {
          result.u = ratio;
          result.blocking_neuron = idx;
        }
      }
      ++idx;
    }
  }
  result.gradient = std::move(grad);
  return result;
}

RatioTestResult ratio_test(const Network& net, std::span<const double> x, DeltaMode mode) {
  const ForwardTrace trace = forward(net, x);
  return ratio_test(net, x, trace, gradient(net, trace), mode);
}

}  // namespace reluwalk
