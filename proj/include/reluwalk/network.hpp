#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace reluwalk {

/// Fully connected layer, weights stored row-major (outputs x inputs).
struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  double weight(std::size_t row, std::size_t col) const noexcept { return weights[row * inputs + col]; }
  std::span<const double> row(std::size_t r) const noexcept {
    return {weights.data() + r * inputs, inputs};
  }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// ReLU feed-forward network with a single linear output.
///
/// Immutable after construction. The constructor checks that consecutive
/// layers chain, that the output has exactly one unit and that every entry is
/// finite; `strict` additionally requires all entries to lie in [-1, 1].
class Network {
 public:
  Network(std::size_t input_dim, std::vector<DenseLayer> hidden, DenseLayer output,
          bool strict = false);

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t depth() const noexcept { return hidden_.size(); }
  const std::vector<DenseLayer>& hidden_layers() const noexcept { return hidden_; }
  const DenseLayer& output_layer() const noexcept { return output_; }

  std::size_t hidden_neuron_count() const noexcept { return neuron_count_; }
  std::size_t parameter_count() const noexcept;
  std::size_t max_width() const noexcept;
  /// True when every weight and bias lies in [-1, 1].
  bool entries_within_unit_bound() const noexcept;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  std::size_t input_dim_;
  std::vector<DenseLayer> hidden_;
  DenseLayer output_;
  std::size_t neuron_count_ = 0;
};

/// Per-layer preactivations g^l, activations h^l = max(0, g^l), and f(x).
struct ForwardTrace {
  std::vector<std::vector<double>> preactivations;
  std::vector<std::vector<double>> activations;
  double output = 0.0;
};

/// One bit per hidden neuron, grouped by layer. A neuron with g >= 0 gets 1,
/// so binding neurons (g == 0) count as active.
class ActivationPattern {
 public:
  ActivationPattern() = default;
  explicit ActivationPattern(std::vector<std::vector<std::uint8_t>> layers);

  /// Pattern whose flat bit i (layer-major order) is bit i of `index`.
  static ActivationPattern from_index(const Network& net, std::uint64_t index);
  /// Pattern with every hidden neuron set to `value`.
  static ActivationPattern uniform(const Network& net, bool value);

  const std::vector<std::vector<std::uint8_t>>& layers() const noexcept { return layers_; }
  std::span<const std::uint8_t> layer(std::size_t l) const noexcept { return layers_[l]; }
  std::size_t bit_count() const noexcept;
  bool bit(std::size_t layer, std::size_t neuron) const noexcept { return layers_[layer][neuron] != 0; }
  /// Flat layer-major bit string, e.g. "1011".
  std::string to_string() const;

  /// Throws InputError if the layer sizes do not match `net`.
  void check_shape(const Network& net) const;

  friend bool operator==(const ActivationPattern&, const ActivationPattern&) = default;

 private:
  std::vector<std::vector<std::uint8_t>> layers_;
};

ForwardTrace forward(const Network& net, std::span<const double> x);
/// Same as above but reuses the buffers in `out`.
void forward(const Network& net, std::span<const double> x, ForwardTrace& out);

/// f(x) only.
double evaluate(const Network& net, std::span<const double> x);

ActivationPattern activation_pattern(const Network& net, std::span<const double> x);
ActivationPattern pattern_of(const ForwardTrace& trace);

/// w_out * prod_l diag(z^l) W^l with z = activation_pattern(x). Equals the
/// gradient of f at interior points and is a valid subgradient choice at
/// binding points.
std::vector<double> gradient(const Network& net, std::span<const double> x);
/// Same product, read off an existing forward trace.
std::vector<double> gradient(const Network& net, const ForwardTrace& trace);
/// Same product for an explicit pattern.
std::vector<double> masked_gradient(const Network& net, const ActivationPattern& pattern);

/// Architecture n0 -> (width x depth) -> 1 with all weights and biases drawn
/// i.i.d. Uniform(-1, 1) from Rng(seed), layer by layer, weights (row-major)
/// before biases.
Network random_network(std::size_t input_dim, std::size_t depth, std::size_t width,
                       std::uint64_t seed);

/// Network with every weight zero and the given output bias.
Network constant_network(std::size_t input_dim, std::size_t depth, std::size_t width,
                         double output_bias);

}  // namespace reluwalk
