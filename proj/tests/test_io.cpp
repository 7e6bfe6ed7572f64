#include <doctest.h>

#include <cmath>

#include "hsparse/error.hpp"
#include "hsparse/io.hpp"

using namespace hsparse;

namespace {

ErrorCode parse_code(std::string_view text) {
  try {
    parse_hypergraph(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse accepted invalid input");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("serialize then parse is the identity") {
  for (Seed seed = 0; seed < 20; ++seed) {
    const auto h = random_hypergraph({25, 40, 6, 1e-3, 1e3, seed}).hypergraph;
    const auto doc = parse_hypergraph(serialize_hypergraph(h));
    CHECK(doc.hypergraph == h);
    CHECK(doc.meta.is_null());
  }
}

TEST_CASE("awkward weights survive the round trip bit for bit") {
  const std::vector<double> weights{0.1, 1.0 / 3.0, std::nextafter(1.0, 2.0), 1e-300, 6.02214076e23};
  std::vector<RawHyperedge> edges;
  for (double w : weights) edges.push_back({{0, 1, 2}, w});
  const auto h = Hypergraph::validate(3, edges);
  CHECK(parse_hypergraph(serialize_hypergraph(h)).hypergraph == h);
}

TEST_CASE("meta is carried but ignored by equality") {
  const auto h = Hypergraph::validate(3, {{{0, 1}, 1.5}});
  const auto doc = parse_hypergraph(serialize_hypergraph(h, {{"seed", 5}, {"M", 10}}));
  CHECK(doc.hypergraph == h);
  CHECK(doc.meta["seed"] == 5);
  CHECK(parse_hypergraph(R"({"n":3,"edges":[{"v":[0,1],"w":1.5}],"meta":{"x":1}})").hypergraph ==
        parse_hypergraph(R"({"n":3,"edges":[{"v":[1,0],"w":1.5}]})").hypergraph);
}

TEST_CASE("malformed documents are parse errors, invalid hypergraphs keep their codes") {
  CHECK(parse_code("not json") == ErrorCode::Parse);
  CHECK(parse_code(R"({"edges":[]})") == ErrorCode::Parse);
  CHECK(parse_code(R"({"n":3,"edges":[{"v":[0,1]}]})") == ErrorCode::Parse);
  CHECK(parse_code(R"({"n":3,"edges":[{"v":"01","w":1}]})") == ErrorCode::Parse);
  CHECK(parse_code(R"({"n":3,"edges":[{"v":[0],"w":1}]})") == ErrorCode::SingletonEdge);
  CHECK(parse_code(R"({"n":3,"edges":[{"v":[0,1],"w":0}]})") == ErrorCode::NonpositiveWeight);
  CHECK(parse_code(R"({"n":3,"edges":[{"v":[0,5],"w":1}]})") == ErrorCode::VertexOutOfRange);
}

TEST_CASE("file helpers") {
  const auto path = std::filesystem::temp_directory_path() / "hsparse_io_test.json";
  const auto h = Hypergraph::validate(4, {{{0, 1, 3}, 2.0}, {{2, 3}, 0.25}});
  write_hypergraph_file(path, h, {{"k", "v"}});
  const auto doc = read_hypergraph_file(path);
  CHECK(doc.hypergraph == h);
  CHECK(doc.meta["k"] == "v");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_hypergraph_file(path), Error);
}

TEST_CASE("seeds parse in decimal and hex") {
  CHECK(parse_seed("0") == 0);
  CHECK(parse_seed("12345") == 12345);
  CHECK(parse_seed("0xff") == 255);
  CHECK(parse_seed("0XDEADBEEF") == 0xDEADBEEFull);
  CHECK(parse_seed("18446744073709551615") == 18446744073709551615ull);
  CHECK_THROWS_AS(parse_seed("18446744073709551616"), Error);
  CHECK_THROWS_AS(parse_seed("-1"), Error);
  CHECK_THROWS_AS(parse_seed("12abc"), Error);
  CHECK_THROWS_AS(parse_seed(""), Error);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 2.0 / 3.0, 1e-17, 123456789.123456789}) CHECK(std::stod(format_double(v)) == v);
}
