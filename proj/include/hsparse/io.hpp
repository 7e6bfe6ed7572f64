#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hsparse/hypergraph.hpp"
#include "hsparse/rng.hpp"

namespace hsparse {

// Hypergraph file format:
//   {"n": <int>, "edges": [{"v": [<int>, ...], "w": <number>}, ...], "meta": {...}}
// "meta" is optional provenance and plays no part in equality. Weights are
// written with 17 significant digits, so parse(serialize(h)) == h exactly.

struct HypergraphDocument {
  Hypergraph hypergraph;
  nlohmann::json meta;  // null when absent
};

std::string serialize_hypergraph(const Hypergraph& h, const nlohmann::json& meta = nullptr);
HypergraphDocument parse_hypergraph(std::string_view text);

HypergraphDocument read_hypergraph_file(const std::filesystem::path& path);
void write_hypergraph_file(const std::filesystem::path& path, const Hypergraph& h,
                           const nlohmann::json& meta = nullptr);

void write_text_file(const std::filesystem::path& path, const std::string& text);

/// 64-bit seed in decimal or 0x-prefixed hex.
Seed parse_seed(std::string_view text);

/// %.17g: enough digits for an exact round trip of any double.
std::string format_double(double value);

}  // namespace hsparse
