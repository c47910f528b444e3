#include "doctest.h"

#include <string>

#include "heightdyn/documents.hpp"
#include "heightdyn/registry.hpp"
#include "support.hpp"

using namespace heightdyn;

namespace {

std::string error_path(const std::string& text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return e.path();
  }
  return "<accepted>";
}

template <class T, class Parse>
void round_trip(const T& value, Parse parse) {
  const std::string text = to_json(value).dump();
  CHECK(parse(parse_json(text)) == value);
}

}  // namespace

TEST_CASE("lattice documents") {
  const auto doc = parse_document(
      R"({"rank":2,"labels":["E+","E-"],"field_d":3,"cone":{"type":"orthant"},"witness_ample":["1","1"]})");
  REQUIRE(std::holds_alternative<PicardLattice>(doc));
  CHECK(std::get<PicardLattice>(doc) == examples::k3_lattice());

  const auto q = parse_lattice(parse_json(
      R"({"rank":3,"cone":{"type":"quadratic","gram":[[0,"1",1],[1,0,1],[1,1,0]],"linear":[1,1,1]},"witness_ample":[1,1,1]})"));
  CHECK_FALSE(q.is_orthant());
  CHECK(q.labels() == std::vector<std::string>{"E1", "E2", "E3"});
  CHECK(q.is_ample({-3, 5, 9}));
}

TEST_CASE("scalars") {
  CHECK(parse_scalar(Json("7-4√3")) == QuadraticNumber(7, -4, 3));
  CHECK(parse_scalar(Json(12)) == QuadraticNumber(12));
  CHECK(parse_scalar(Json("-3/4")) == QuadraticNumber(Rational(-3, 4)));
  CHECK_THROWS_AS(parse_scalar(Json("7-4√")), ParseError);
  CHECK_THROWS_AS(parse_scalar(Json(1.5)), ParseError);
  CHECK(parse_rational(Json("5/2")) == Rational(5, 2));
  CHECK_THROWS_AS(parse_rational(Json("√2")), ParseError);
  CHECK(to_json(QuadraticNumber(7, -4, 3)) == Json("7-4√3"));
}

TEST_CASE("error paths") {
  CHECK(error_path(R"({"cone":{"type":"fan"}})") == "$.cone.type");
  CHECK(error_path(R"({"rank":2,"cone":{"type":"orthant"},"witness_ample":["1","x"]})") == "$.witness_ample[1]");
  CHECK(error_path(
            R"({"rank":2,"cone":{"type":"quadratic","gram":[[0,1],[1]],"linear":[1,1]},"witness_ample":[1,1]})") ==
        "$.cone.gram[1]");
  CHECK(error_path(R"({"matrix":[[1,2],[3]]})") == "$.matrix[1]");
  CHECK(error_path(R"({"matrix":[[1,"2+"],[3,4]]})") == "$.matrix[0][1]");
  CHECK(error_path(R"({"signature":[1],"targets":[[{"terms":[{"c":1,"e":[2]}]},{"terms":[{"c":1,"e":[0,2]}]}]]})") ==
        "$.targets[0][0].terms[0].e");
  CHECK(error_path("{not json") == "$");
  CHECK(error_path(R"({"unrelated":1})") == "$");
  CHECK(error_path("42") == "$");
  // A rejected cone surfaces as a parse error at the document root.
  CHECK(error_path(R"({"rank":2,"cone":{"type":"orthant"},"witness_ample":[1,0]})") == "$");
}

TEST_CASE("dispatch on document shape") {
  CHECK(std::holds_alternative<PullbackMap>(parse_document(R"({"matrix":[["0","7+4√3"],[1,0]]})")));
  CHECK(std::holds_alternative<DivisorClass>(parse_document(R"({"coeffs":[1,"2"]})")));
  CHECK(std::holds_alternative<DivisorClass>(parse_document(R"([1,"1/2"])")));
  const auto m = parse_document(
      R"({"signature":[1],"targets":[[{"terms":[{"c":1,"e":[2,0]},{"c":1,"e":[0,2]}]},{"terms":[{"c":1,"e":[1,1]}]}]]})");
  REQUIRE(std::holds_alternative<MultiHomogeneousMap>(m));
  CHECK(std::get<MultiHomogeneousMap>(m) == examples::sum_of_squares_map());
}

TEST_CASE("points and integer matrices") {
  const auto p = parse_point(parse_json(R"([[2,-4],["-3","100000000000000000000000"]])"));
  CHECK(p[0].coords() == std::vector<Integer>{1, -2});
  CHECK(p[1][1] == Integer("-100000000000000000000000"));
  CHECK(parse_point(parse_json(R"({"point":[[0,3]]})"))[0].coords() == std::vector<Integer>{0, 1});
  CHECK_THROWS_AS(parse_point(parse_json("[[0,0]]")), ParseError);
  CHECK_THROWS_AS(parse_point(parse_json("[]")), ParseError);
  CHECK(parse_int_matrix(parse_json("[[0,3],[2,0]]")) == IntMatrix{{0, 3}, {2, 0}});
  CHECK(parse_int_matrix(parse_json(R"({"matrix":[[1]]})")) == IntMatrix{{1}});
  CHECK_THROWS_AS(parse_int_matrix(parse_json("[[1,2],[3]]")), ParseError);
  CHECK(to_json(p).dump() == R"([[1,-2],[3,"-100000000000000000000000"]])");
}

TEST_CASE("round trips") {
  for (const auto& c : example_cases()) {
    round_trip(c.lattice, [](const Json& j) { return parse_lattice(j); });
    round_trip(c.pullback, [](const Json& j) { return parse_pullback(j); });
    round_trip(c.divisor, [](const Json& j) { return parse_divisor(j); });
    if (c.morphism) round_trip(*c.morphism, [](const Json& j) { return parse_morphism(j); });
  }
  round_trip(examples::sum_of_squares_map(), [](const Json& j) { return parse_morphism(j); });
  round_trip(MultiHomogeneousMap::identity({1, 2, 0}), [](const Json& j) { return parse_morphism(j); });
  for (int k = 0; k < 100; ++k) {
    std::vector<std::vector<QuadraticNumber>> rows(3);
    for (auto& r : rows)
      for (int i = 0; i < 3; ++i) r.push_back(testing::random_quadratic(7));
    round_trip(PullbackMap(rows), [](const Json& j) { return parse_pullback(j); });
    round_trip(DivisorClass(rows[0]), [](const Json& j) { return parse_divisor(j); });
    const auto doc = parse_document(to_json(Document(PullbackMap(rows))).dump());
    CHECK(std::get<PullbackMap>(doc) == PullbackMap(rows));
  }
}

TEST_CASE("coefficient results serialize with their method") {
  const auto r = mu1(examples::k3_phi(), {1, 1}, examples::k3_lattice());
  const Json j = to_json(r);
  CHECK(j["value"] == "7-4√3");
  CHECK(j["exact"] == true);
  CHECK(j["method"] == "closed_form");
  CHECK(j["approx"].get<double>() == doctest::Approx(7 - 4 * std::sqrt(3.0)));
  const Json b = to_json(CoefficientResult::bisection(0.5));
  CHECK(b["exact"] == false);
  CHECK(b["method"] == "bisection");
}

TEST_CASE("example registry") {
  const auto report = run_example_registry();
  CHECK(report.all_passed);
  CHECK(report.outcomes.size() == example_cases().size());
  for (const auto& o : report.outcomes) CHECK_MESSAGE(o.passed, std::string(o.name + ": " + o.error));
  const Json j = to_json(report);
  CHECK(j["all_passed"] == true);
  CHECK(j["cases"].size() == report.outcomes.size());
}
