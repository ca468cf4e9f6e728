// Exercises the shared library strictly through its C header.

#include <cstring>
#include <string>

#include "bkeq/bkeq.h"
#include "doctest.h"

namespace {

const char* kRunning = R"({"n":1,"m":1,"A":[[0.5,1],[0,0.8]]})";

struct Handles {
  bkeq_model* model = nullptr;
  bkeq_analysis* analysis = nullptr;
  ~Handles() {
    bkeq_analysis_free(analysis);
    bkeq_model_free(model);
  }
};

std::string take(char* s) {
  std::string out(s);
  bkeq_string_free(s);
  return out;
}

}  // namespace

TEST_CASE("model handles and input errors") {
  Handles h;
  REQUIRE(bkeq_model_from_json(kRunning, &h.model) == BKEQ_OK);
  CHECK(bkeq_model_n(h.model) == 1);
  CHECK(bkeq_model_m(h.model) == 1);

  bkeq_model* bad = nullptr;
  CHECK(bkeq_model_from_json(R"({"n":1,"m":1,"A":[[0.5,1]]})", &bad) == BKEQ_ERR_INPUT);
  CHECK(bad == nullptr);
  CHECK(std::string(bkeq_last_error()).find("A must be 2x2") != std::string::npos);
  CHECK(bkeq_model_from_json(nullptr, &bad) == BKEQ_ERR_INPUT);
  CHECK(bkeq_model_from_file("/nonexistent/model.json", &bad) == BKEQ_ERR_INPUT);

  bkeq_model* from_file = nullptr;
  REQUIRE(bkeq_model_from_file(BKEQ_TEST_DATA "/running.json", &from_file) == BKEQ_OK);
  bkeq_model_free(from_file);
}

TEST_CASE("analysis of the running example") {
  Handles h;
  REQUIRE(bkeq_model_from_json(kRunning, &h.model) == BKEQ_OK);
  bkeq_options options;
  bkeq_options_init(&options);
  REQUIRE(bkeq_analyze(h.model, &options, &h.analysis) == BKEQ_OK);
  CHECK(bkeq_analysis_case(h.analysis) == BKEQ_CASE_FINITE_MANY);
  CHECK(bkeq_analysis_boundary_blocked(h.analysis) == 0);
  REQUIRE(bkeq_analysis_equilibrium_count(h.analysis) == 2);

  double N = 1.0;
  int is_real = 0;
  REQUIRE(bkeq_analysis_equilibrium(h.analysis, 1, &N, &is_real) == BKEQ_OK);
  CHECK(N == doctest::Approx(-0.3).epsilon(1e-13));
  CHECK(is_real == 1);
  CHECK(bkeq_analysis_equilibrium(h.analysis, 2, &N, &is_real) == BKEQ_ERR_RANGE);

  char* text = nullptr;
  REQUIRE(bkeq_analysis_render(h.analysis, BKEQ_FORMAT_TEXT, 0, &text) == BKEQ_OK);
  const std::string summary = take(text);
  CHECK(summary.find("Case 3.1: 2 of 2 candidates realized") != std::string::npos);
  CHECK(summary.find("equilibria:") == std::string::npos);
  REQUIRE(bkeq_analysis_render(h.analysis, BKEQ_FORMAT_JSON, 1, &text) == BKEQ_OK);
  CHECK(take(text).find("\"equilibria\"") != std::string::npos);
}

TEST_CASE("simulation through the C API") {
  Handles h;
  REQUIRE(bkeq_model_from_json(kRunning, &h.model) == BKEQ_OK);
  REQUIRE(bkeq_analyze(h.model, nullptr, &h.analysis) == BKEQ_OK);
  const double k0 = 1.0;
  char* text = nullptr;
  REQUIRE(bkeq_analysis_simulate(h.analysis, 0, &k0, 1, 3, BKEQ_FORMAT_TEXT, &text) == BKEQ_OK);
  CHECK(take(text).find("\n3 0.125 0\n") != std::string::npos);
  CHECK(bkeq_analysis_simulate(h.analysis, 5, &k0, 1, 3, BKEQ_FORMAT_TEXT, &text) ==
        BKEQ_ERR_RANGE);
  CHECK(bkeq_analysis_simulate(h.analysis, 0, &k0, 0, 3, BKEQ_FORMAT_TEXT, &text) ==
        BKEQ_ERR_INPUT);
  CHECK(bkeq_analysis_simulate(h.analysis, 0, &k0, 1, -1, BKEQ_FORMAT_TEXT, &text) ==
        BKEQ_ERR_INPUT);
}

TEST_CASE("boundary handling and tolerance overrides") {
  Handles h;
  REQUIRE(bkeq_model_from_json(R"({"n":1,"m":1,"A":[[1,0],[0,1]]})", &h.model) == BKEQ_OK);
  REQUIRE(bkeq_analyze(h.model, nullptr, &h.analysis) == BKEQ_OK);
  CHECK(bkeq_analysis_boundary_blocked(h.analysis) == 1);
  CHECK(bkeq_analysis_case(h.analysis) == BKEQ_CASE_WITHHELD);

  bkeq_options options;
  bkeq_options_init(&options);
  options.boundary = BKEQ_BOUNDARY_UNSTABLE;
  bkeq_analysis* overridden = nullptr;
  REQUIRE(bkeq_analyze(h.model, &options, &overridden) == BKEQ_OK);
  CHECK(bkeq_analysis_case(overridden) == BKEQ_CASE_NO_EQUILIBRIUM);
  bkeq_analysis_free(overridden);

  options.rank_tol = 0.5;
  bkeq_analysis* rejected = nullptr;
  CHECK(bkeq_analyze(h.model, &options, &rejected) == BKEQ_ERR_INPUT);
  CHECK(rejected == nullptr);
}

TEST_CASE("verify through the C API") {
  Handles h;
  REQUIRE(bkeq_model_from_json(kRunning, &h.model) == BKEQ_OK);
  char* text = nullptr;
  int passed = -1;
  REQUIRE(bkeq_verify(h.model, nullptr, "[[0]]", BKEQ_FORMAT_TEXT, &text, &passed) == BKEQ_OK);
  CHECK(passed == 1);
  bkeq_string_free(text);
  REQUIRE(bkeq_verify(h.model, nullptr, "[[1]]", BKEQ_FORMAT_JSON, &text, &passed) == BKEQ_OK);
  CHECK(passed == 0);
  CHECK(take(text).find("\"passed\": false") != std::string::npos);
  CHECK(bkeq_verify(h.model, nullptr, "[[0, 1]]", BKEQ_FORMAT_TEXT, &text, &passed) ==
        BKEQ_ERR_INPUT);
}
