#include "hsparse/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hsparse/error.hpp"

namespace hsparse {

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string serialize_hypergraph(const Hypergraph& h, const nlohmann::json& meta) {
  std::string out = "{\"n\": " + std::to_string(h.num_vertices()) + ", \"edges\": [";
  for (std::size_t k = 0; k < h.num_edges(); ++k) {
    const auto& e = h.edge(k);
    out += k == 0 ? "\n  " : ",\n  ";
    out += "{\"v\": [";
    for (std::size_t a = 0; a < e.size(); ++a) {
      if (a) out += ", ";
      out += std::to_string(e.vertices[a]);
    }
    out += "], \"w\": " + format_double(e.weight) + "}";
  }
  out += h.num_edges() ? "\n]" : "]";
  if (!meta.is_null()) out += ",\n\"meta\": " + meta.dump();
  out += "}\n";
  return out;
}

HypergraphDocument parse_hypergraph(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& ex) {
    throw Error(ErrorCode::Parse, ex.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("edges")) {
    throw Error(ErrorCode::Parse, "expected an object with \"n\" and \"edges\"");
  }
  if (!doc["n"].is_number_integer()) throw Error(ErrorCode::Parse, "\"n\" must be an integer");
  if (!doc["edges"].is_array()) throw Error(ErrorCode::Parse, "\"edges\" must be an array");

  std::vector<RawHyperedge> raw;
  raw.reserve(doc["edges"].size());
  for (const auto& item : doc["edges"]) {
    if (!item.is_object() || !item.contains("v") || !item.contains("w") || !item["v"].is_array() ||
        !item["w"].is_number()) {
      throw Error(ErrorCode::Parse, "each edge needs \"v\" (array) and \"w\" (number)");
    }
    RawHyperedge e;
    for (const auto& v : item["v"]) {
      if (!v.is_number_integer()) throw Error(ErrorCode::Parse, "vertex ids must be integers");
      e.vertices.push_back(v.get<Vertex>());
    }
    e.weight = item["w"].get<double>();
    raw.push_back(std::move(e));
  }
  HypergraphDocument out{Hypergraph::validate(doc["n"].get<int>(), std::move(raw)), nullptr};
  if (doc.contains("meta")) out.meta = doc["meta"];
  return out;
}

HypergraphDocument read_hypergraph_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_hypergraph(buf.str());
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

void write_hypergraph_file(const std::filesystem::path& path, const Hypergraph& h, const nlohmann::json& meta) {
  write_text_file(path, serialize_hypergraph(h, meta));
}

Seed parse_seed(std::string_view text) {
  int base = 10;
  if (text.size() > 2 && text[0] == '0' && (text[1] == 'x' || text[1] == 'X')) {
    base = 16;
    text.remove_prefix(2);
  }
  Seed value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value, base);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidArgument, "seed must be a 64-bit unsigned integer (decimal or 0x-hex)");
  }
  return value;
}

}  // namespace hsparse
