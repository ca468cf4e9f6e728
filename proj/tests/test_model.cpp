#include <random>
#include <string>

#include "bkeq/error.hpp"
#include "bkeq/model.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace bkeq;

namespace {

std::string load_error(const std::string& doc) {
  try {
    load_model(doc);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("load_model accepts a well-formed document with default tolerances") {
  const auto spec = load_model(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]]})");
  CHECK(spec.n() == 1);
  CHECK(spec.m() == 1);
  CHECK(spec.A() == testing::mat({{0.5, 1}, {0, 0.8}}));
  CHECK(spec.tol() == Tolerances{});
  CHECK(spec.tol().unit_margin == 1e-9);
  CHECK(spec.tol().cluster_tol == 1e-8);
  CHECK(spec.tol().rank_tol == 1e-10);
  CHECK(spec.tol().residual_tol == 1e-8);
}

TEST_CASE("load_model diagnostics") {
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1]]})").find("A must be 2x2") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0]]})").find("A must be 2x2") !=
        std::string::npos);
  CHECK(load_error(R"({"n":2,"m":0,"A":[[1,0],[0,1]]})").find("m >= 1") !=
        std::string::npos);
  CHECK(load_error(R"({"n":0,"m":0,"A":[]})").find("n + m must be positive") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[1e400,0],[0,1]]})").find("not finite") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]]")").find("malformed") !=
        std::string::npos);
  CHECK(load_error(R"([1,2])").find("malformed") != std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]],"B":1})").find("unknown key") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1.5,"m":1,"A":[[0.5,1],[0,0.8]]})").find("integer") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,"x"],[0,0.8]]})").find("number") !=
        std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1})").find("\"A\"") != std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]],"names":["k"]})")
            .find("names") != std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]],"tol":{"rank_tol":0.5}})")
            .find("rank_tol") != std::string::npos);
  CHECK(load_error(R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]],"tol":{"foo":1e-3}})")
            .find("unknown key") != std::string::npos);
}

TEST_CASE("load_model reads names and tolerance overrides") {
  const auto spec = load_model(
      R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]],"names":["k","q"],
          "tol":{"unit_margin":1e-6,"residual_tol":1e-7}})");
  CHECK(spec.names() == std::vector<std::string>{"k", "q"});
  CHECK(spec.tol().unit_margin == 1e-6);
  CHECK(spec.tol().residual_tol == 1e-7);
  CHECK(spec.tol().cluster_tol == 1e-8);
}

TEST_CASE("load_model is deterministic") {
  const std::string doc = R"({"n":2,"m":1,"A":[[0.1,0.2,0.3],[0.4,0.5,0.6],[0.7,0.8,0.9]]})";
  const auto a = load_model(doc);
  const auto b = load_model(doc);
  CHECK(a.A() == b.A());
  CHECK(a.tol() == b.tol());
  CHECK(a.n() == b.n());
}

TEST_CASE("tolerance overrides validate their range") {
  ToleranceOverrides o;
  o.cluster_tol = 1e-6;
  CHECK(o.apply({}).cluster_tol == 1e-6);
  o.rank_tol = 0.0;
  CHECK_THROWS_AS(o.apply({}), InputError);
}

TEST_CASE("partition_blocks slices the (n, m) split") {
  const auto blocks = partition_blocks(testing::running_example());
  CHECK(blocks.nn(0, 0) == 0.5);
  CHECK(blocks.nm(0, 0) == 1.0);
  CHECK(blocks.mn(0, 0) == 0.0);
  CHECK(blocks.mm(0, 0) == 0.8);

  const ModelSpec forward(0, 2, testing::mat({{0.1, 0.2}, {0.3, 0.4}}));
  const auto fb = partition_blocks(forward);
  CHECK(fb.mm == forward.A());
  CHECK(fb.nn.size() == 0);
  CHECK(fb.nm.rows() == 0);
  CHECK(fb.mn.cols() == 0);

  const Matrix A3 = testing::mat({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  const auto b3 = partition_blocks(ModelSpec(2, 1, A3));
  CHECK(b3.nn == A3.topLeftCorner(2, 2));
}

TEST_CASE("partition then reassembly reproduces A exactly") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> dim(1, 10);
    const int size = dim(rng);
    std::uniform_int_distribution<int> split(0, size - 1);
    const int n = split(rng);
    const Matrix A = testing::random_matrix(rng, size, -3, 3);
    const ModelSpec spec(n, size - n, A);
    CHECK(partition_blocks(spec).assemble() == A);
  }
}
