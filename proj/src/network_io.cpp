#include "reluwalk/network_io.hpp"

#include <fstream>

#include "reluwalk/error.hpp"

namespace reluwalk {
namespace {

using nlohmann::json;

std::vector<double> read_vector(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + ": expected an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw InputError(std::string(what) + ": expected numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

DenseLayer read_layer(const json& j, std::size_t expected_inputs, const std::string& what) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("bias")) {
    throw InputError(what + ": needs \"weights\" and \"bias\"");
  }
  const json& rows = j.at("weights");
  if (!rows.is_array() || rows.empty()) throw InputError(what + ": weights must be a non-empty array");
  DenseLayer layer;
  layer.outputs = rows.size();
  layer.inputs = expected_inputs;
  layer.weights.reserve(layer.outputs * layer.inputs);
  for (const auto& row : rows) {
    auto r = read_vector(row, "weights row");
    if (r.size() != expected_inputs) {
      throw InputError(what + ": weight row has " + std::to_string(r.size()) + " columns, expected " +
                       std::to_string(expected_inputs));
    }
    layer.weights.insert(layer.weights.end(), r.begin(), r.end());
  }
  layer.bias = read_vector(j.at("bias"), "bias");
  if (layer.bias.size() != layer.outputs) throw InputError(what + ": bias length mismatch");
  return layer;
}

json layer_to_json(const DenseLayer& layer) {
  json rows = json::array();
  for (std::size_t r = 0; r < layer.outputs; ++r) {
    auto row = layer.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return {{"weights", rows}, {"bias", layer.bias}};
}

}  // namespace

json network_to_json(const Network& net) {
  json hidden = json::array();
  for (const auto& layer : net.hidden_layers()) hidden.push_back(layer_to_json(layer));
  return {{"input_dim", net.input_dim()},
          {"hidden_layers", hidden},
          {"output_layer", layer_to_json(net.output_layer())}};
}

Network network_from_json(const json& j, bool strict) {
  if (!j.is_object()) throw InputError("network JSON must be an object");
  if (!j.contains("input_dim") || !j.at("input_dim").is_number_unsigned()) {
    throw InputError("network JSON: \"input_dim\" must be a positive integer");
  }
  const auto n0 = j.at("input_dim").get<std::size_t>();
  std::vector<DenseLayer> hidden;
  std::size_t fan_in = n0;
  if (j.contains("hidden_layers")) {
    const json& layers = j.at("hidden_layers");
    if (!layers.is_array()) throw InputError("network JSON: \"hidden_layers\" must be an array");
    for (std::size_t l = 0; l < layers.size(); ++l) {
      hidden.push_back(read_layer(layers[l], fan_in, "hidden layer " + std::to_string(l)));
      fan_in = hidden.back().outputs;
    }
  }
  if (!j.contains("output_layer")) throw InputError("network JSON: missing \"output_layer\"");
  DenseLayer out = read_layer(j.at("output_layer"), fan_in, "output layer");
  return Network(n0, std::move(hidden), std::move(out), strict);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

void save_network(const Network& net, const std::filesystem::path& path) {
  write_json_file(network_to_json(net), path);
}

Network load_network(const std::filesystem::path& path, bool strict) {
  return network_from_json(read_json_file(path), strict);
}

json box_to_json(const Box& box) { return {{"lower", box.lower()}, {"upper", box.upper()}}; }

Box box_from_json(const json& j) {
  if (!j.is_object() || !j.contains("lower") || !j.contains("upper")) {
    throw InputError("box JSON needs \"lower\" and \"upper\"");
  }
  return Box(read_vector(j.at("lower"), "lower"), read_vector(j.at("upper"), "upper"));
}

void save_box(const Box& box, const std::filesystem::path& path) {
  write_json_file(box_to_json(box), path);
}

Box load_box(const std::filesystem::path& path) { return box_from_json(read_json_file(path)); }

}  // namespace reluwalk
