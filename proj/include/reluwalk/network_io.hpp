#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "reluwalk/geometry.hpp"
#include "reluwalk/network.hpp"

namespace reluwalk {

// Network JSON:
//   {"input_dim": n,
//    "hidden_layers": [{"weights": [[...], ...], "bias": [...]}, ...],
//    "output_layer": {"weights": [[...]], "bias": [b]}}
// weights are row-major, one inner array per output neuron.
// Box JSON: {"lower": [...], "upper": [...]}

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& j, bool strict = false);

void save_network(const Network& net, const std::filesystem::path& path);
Network load_network(const std::filesystem::path& path, bool strict = false);

nlohmann::json box_to_json(const Box& box);
Box box_from_json(const nlohmann::json& j);

void save_box(const Box& box, const std::filesystem::path& path);
Box load_box(const std::filesystem::path& path);

/// Parses a whole file as JSON; InputError on I/O or syntax failures.
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace reluwalk
