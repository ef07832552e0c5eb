// Exercises the shared library through its C interface only.
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "degen/degen.h"

TEST_CASE("c api: status names and version") {
  CHECK(std::string(degen_version()).size() > 0);
  CHECK(std::string(degen_status_name(DEGEN_OK)) == "ok");
  CHECK(std::string(degen_status_name(DEGEN_CHECK_FAILED)) == "check_failed");
  CHECK(degen_command_count() == 6);
  CHECK(std::string(degen_command_name(0)) == "check");
  CHECK(degen_command_name(99) == nullptr);
}

TEST_CASE("c api: null arguments") {
  degen_config* c = nullptr;
  CHECK(degen_config_parse(nullptr, &c) == DEGEN_ERR_ARGUMENT);
  CHECK(c == nullptr);
  CHECK(std::string(degen_last_error()).find("NULL") != std::string::npos);
  CHECK(degen_config_parse("", nullptr) == DEGEN_ERR_ARGUMENT);
  degen_report* r = nullptr;
  CHECK(degen_run("check", nullptr, nullptr, &r) == DEGEN_ERR_ARGUMENT);
  CHECK(degen_eddy_get_dims(nullptr, nullptr) == DEGEN_ERR_ARGUMENT);
  degen_config_free(nullptr);
  degen_report_free(nullptr);
  degen_eddy_free(nullptr);
  CHECK(degen_report_pass(nullptr) == 0);
}

TEST_CASE("c api: config errors") {
  degen_config* c = nullptr;
  CHECK(degen_config_parse("[mesh\n", &c) == DEGEN_ERR_CONFIG);
  CHECK(c == nullptr);
  CHECK(std::string(degen_last_error()).find(":1:") != std::string::npos);
  CHECK(degen_config_load("/nonexistent/file.cfg", &c) == DEGEN_ERR_CONFIG);
}

TEST_CASE("c api: run a command") {
  degen_config* c = nullptr;
  REQUIRE(degen_config_parse("[mesh]\nn = 4\nconducting_boxes = [[1, 3, 1, 3, 1, 3]]\n[check]\nsamples = 5\n", &c) ==
          DEGEN_OK);
  degen_report* r = nullptr;
  CHECK(degen_run("nope", c, nullptr, &r) == DEGEN_ERR_ARGUMENT);
  CHECK(r == nullptr);
  const degen_run_options o{1, 7, 1, nullptr};
  REQUIRE(degen_run("check", c, &o, &r) == DEGEN_OK);
  CHECK(degen_report_pass(r) == 1);
  const std::string compact = degen_report_json(r, -1);
  CHECK(compact.find("\"pass\":true") != std::string::npos);
  CHECK(compact.find("\"seed\":7") != std::string::npos);
  CHECK(compact.find('\n') == std::string::npos);
  degen_report_free(r);

  const degen_run_options bad{0, 0, -1, nullptr};
  CHECK(degen_run("check", c, &bad, &r) == DEGEN_ERR_ARGUMENT);
  degen_config_free(c);
}

TEST_CASE("c api: boundary conductor is a certification error") {
  degen_config* c = nullptr;
  REQUIRE(degen_config_parse("[mesh]\nn = 4\nconducting_boxes = [[0, 2, 1, 3, 1, 3]]\n", &c) == DEGEN_OK);
  degen_report* r = nullptr;
  CHECK(degen_run("solve-eddy", c, nullptr, &r) == DEGEN_ERR_CERTIFICATION);
  CHECK(r == nullptr);
  degen_config_free(c);
}

TEST_CASE("c api: eddy handle") {
  const int box[6] = {1, 3, 1, 3, 1, 3};
  degen_eddy* e = nullptr;
  CHECK(degen_eddy_create(4, box, 1, -1.0, 1.0, &e) == DEGEN_ERR_ARGUMENT);
  CHECK(degen_eddy_create(1, nullptr, 0, 1.0, 1.0, &e) == DEGEN_ERR_ARGUMENT);
  REQUIRE(degen_eddy_create(4, box, 1, 1.0, 1.0, &e) == DEGEN_OK);

  degen_eddy_dims d{};
  REQUIRE(degen_eddy_get_dims(e, &d) == DEGEN_OK);
  CHECK(d.edges == 3u * 4u * 9u);
  CHECK(d.components == 1);
  CHECK(d.h0 + d.multipliers == d.edges);

  degen_eddy_constants k{};
  REQUIRE(degen_eddy_get_constants(e, &k) == DEGEN_OK);
  CHECK(k.c0_direct >= k.c0_formula);
  CHECK(k.c_star > 0.0);
  CHECK(k.c_star <= 0.5);

  std::vector<double> j(d.edges, 0.0);
  for (size_t i = 0; i < d.edges; ++i) j[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
  const int steps = 10;
  std::vector<double> field((steps + 1) * d.edges, -1.0);
  double res[2] = {1.0, 1.0};
  REQUIRE(degen_eddy_solve_ramp(e, j.data(), 1.0, steps, 1.0, 0.5, 0.25, field.data(), res) == DEGEN_OK);
  CHECK(res[0] <= 1e-8);
  CHECK(res[1] <= 1e-8);
  // nodes 0..4 precede the ramp start
  for (size_t i = 0; i < 5 * d.edges; ++i) CHECK(field[i] == 0.0);
  double late = 0.0;
  for (size_t i = 10 * d.edges; i < 11 * d.edges; ++i) late = std::max(late, std::abs(field[i]));
  CHECK(late > 0.0);

  CHECK(degen_eddy_solve_ramp(e, j.data(), 1.0, 10, 100.0, 0.0, 0.5, nullptr, nullptr) == DEGEN_ERR_ARGUMENT);
  degen_eddy_free(e);
}
