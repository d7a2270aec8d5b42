#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>

#include "doctest.h"

#include "common/rng.hpp"
#include "runio/json.hpp"

using namespace parkour;
using runio::Json;

TEST_CASE("json parses primitives") {
  CHECK(Json::parse("null").is_null());
  CHECK(Json::parse("true").as_bool());
  CHECK_FALSE(Json::parse("false").as_bool());
  CHECK(Json::parse("42").as_number() == 42.0);
  CHECK(Json::parse("-3.5e2").as_number() == -350.0);
  CHECK(Json::parse("\"hi\"").as_string() == "hi");
  CHECK(Json::parse("  [1, 2, 3]  ").size() == 3);
}

TEST_CASE("json string escapes round-trip") {
  const std::string s = "line\nquote\"back\\slash\ttab\x01 unicode:\xc3\xa9";
  Json j(s);
  const Json back = Json::parse(j.dump());
  CHECK(back.as_string() == s);
  // \uXXXX escapes decode to UTF-8
  CHECK(Json::parse("\"\\u00e9\\u0041\"").as_string() == "\xc3\xa9"
                                                         "A");
}

TEST_CASE("json object keeps insertion order and rejects duplicates") {
  Json obj = Json::object();
  obj["zeta"] = Json(1.0);
  obj["alpha"] = Json(2.0);
  obj["mid"] = Json(3.0);
  const auto& members = obj.members();
  REQUIRE(members.size() == 3);
  CHECK(members[0].first == "zeta");
  CHECK(members[1].first == "alpha");
  CHECK(members[2].first == "mid");
  const Json back = Json::parse(obj.dump(2));
  CHECK(back.members()[0].first == "zeta");

  CHECK_THROWS(Json::parse("{\"a\":1,\"a\":2}"));
}

TEST_CASE("json rejects malformed input") {
  CHECK_THROWS(Json::parse(""));
  CHECK_THROWS(Json::parse("{"));
  CHECK_THROWS(Json::parse("[1,]"));
  CHECK_THROWS(Json::parse("{\"a\" 1}"));
  CHECK_THROWS(Json::parse("\"unterminated"));
  CHECK_THROWS(Json::parse("nul"));
  CHECK_THROWS(Json::parse("1 2"));      // trailing content
  CHECK_THROWS(Json::parse("\"\\q\""));  // bad escape
  CHECK_THROWS(Json::parse("[1, 1e999]"));  // overflow to inf
}

TEST_CASE("json numbers round-trip bit-exactly") {
  // the writer must emit the shortest decimal that parses back to the bits
  const double interesting[] = {0.0,
                                1.0,
                                -1.0,
                                0.1,
                                1.0 / 3.0,
                                0.35,
                                1e-300,
                                -2.5e300,
                                std::numeric_limits<double>::denorm_min(),
                                std::numeric_limits<double>::epsilon(),
                                123456789.123456789};
  for (const double v : interesting) {
    const double back = Json::parse(Json(v).dump()).as_number();
    CHECK(back == v);
  }
  Rng rng(99);
  int checked = 0;
  while (checked < 2000) {
    std::uint64_t bits = rng.next_u64();
    double v;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    ++checked;
    const double back = Json::parse(Json(v).dump()).as_number();
    CHECK(back == v);
  }
}

TEST_CASE("json nested structure round-trips through pretty and compact dumps") {
  Json root = Json::object();
  root["name"] = Json("instance");
  root["flags"] = Json::array();
  root["flags"].push_back(Json(true));
  root["flags"].push_back(Json(false));
  Json inner = Json::object();
  inner["values"] = Json::array();
  for (int i = 0; i < 5; ++i) inner["values"].push_back(Json(i * 0.25));
  root["inner"] = std::move(inner);
  root["empty_arr"] = Json::array();
  root["empty_obj"] = Json::object();

  for (const int indent : {0, 2}) {
    const Json back = Json::parse(root.dump(indent));
    CHECK(back.at("name").as_string() == "instance");
    CHECK(back.at("flags").at(1).as_bool() == false);
    CHECK(back.at("inner").at("values").at(4).as_number() == 1.0);
    CHECK(back.at("empty_arr").size() == 0);
    CHECK(back.at("empty_obj").members().empty());
  }
}

TEST_CASE("json file round-trip") {
  Json j = Json::object();
  j["k"] = Json(0.1 + 0.2);
  const std::string path = "runio_test_tmp.json";
  runio::json_to_file(path, j);
  const Json back = runio::json_from_file(path);
  CHECK(back.at("k").as_number() == 0.1 + 0.2);
  std::remove(path.c_str());
  CHECK_THROWS(runio::json_from_file("does_not_exist_anywhere.json"));
}

TEST_CASE("json lookup errors are typed") {
  const Json j = Json::parse("{\"a\": [1]}");
  CHECK_THROWS(j.at("missing"));
  CHECK_THROWS(j.at("a").as_number());   // array, not number
  CHECK_THROWS(j.at("a").at(5));         // out of range
  CHECK(j.find("missing") == nullptr);
  CHECK(j.find("a") != nullptr);
}
