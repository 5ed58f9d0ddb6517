#include <cstdlib>
#include <fstream>

#include "doctest.h"

#include "curblabel/config.hpp"
#include "curblabel/error.hpp"
#include "support/helpers.hpp"

using namespace curblabel;

TEST_CASE("defaults") {
  const PipelineConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.cell_size == 0.2);
  CHECK(c.height_threshold == 0.3);
  CHECK(c.grow.r1 == 2.6);
  CHECK(c.grow.psi == 6);
  CHECK(c.grow.alpha1 == doctest::Approx(30.0 * M_PI / 180.0));
  CHECK(c.grow.alpha2 == doctest::Approx(10.0 * M_PI / 180.0));
  CHECK(c.grow.r2() == doctest::Approx(7.8));
  CHECK(c.link.d_link == 0.5);
  CHECK(c.link.theta_link == doctest::Approx(20.0 * M_PI / 180.0));
  CHECK(c.fine.r2 == 80.0);
  CHECK(c.fine.r3 == 3.0);
  CHECK(c.fine.r4 == 5.0);
  CHECK(c.fine.kappa == 0.2);
  CHECK(c.fine.phi == 20.0);
  CHECK(c.bev.resolution == 0.1);
  CHECK(c.bev.dilation_kernel == 7);
  CHECK(c.effective_workers() >= 1);
}

TEST_CASE("json round trip keeps the hash") {
  PipelineConfig c;
  c.grow.psi = 8;
  c.fine.phi = 15.0;
  c.frame_end = 12;
  c.sequence_dir = "/data/seq";
  const PipelineConfig back = PipelineConfig::from_json(c.to_json());
  CHECK(back.hash() == c.hash());
  CHECK(back.grow.psi == 8);
  CHECK(back.frame_end == std::optional<std::size_t>(12));
  CHECK(back.sequence_dir == c.sequence_dir);
  CHECK(c.hash().size() == 16);
}

TEST_CASE("hash tracks parameters but not paths or workers") {
  PipelineConfig a;
  PipelineConfig b;
  CHECK(a.hash() == b.hash());
  b.output_dir = "elsewhere";
  b.workers = 7;
  CHECK(a.hash() == b.hash());
  b.seed = 1;
  CHECK(a.hash() != b.hash());
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("unknown and invalid keys are rejected") {
  using nlohmann::json;
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"grow", {{"rl", 2.0}}}}), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"extra", 1}}), InputError);
  CHECK_THROWS_AS(PipelineConfig::from_json(json{{"grow", {{"r1", -1.0}}}}), InputError);
  const PipelineConfig c = PipelineConfig::from_json(json{{"grow", {{"r1", 3.0}}}});
  CHECK(c.grow.r1 == 3.0);
  CHECK(c.grow.psi == 6);
}

TEST_CASE("load from file and environment overrides") {
  testing::TempDir dir;
  const auto path = dir.path() / "c.json";
  {
    std::ofstream out(path);
    out << R"({"paths": {"sequence_dir": "/a"}, "label": {"phi": 12.5}})";
  }
  PipelineConfig c = PipelineConfig::load(path);
  CHECK(c.fine.phi == 12.5);
  CHECK(c.sequence_dir == "/a");
  ::setenv("CURBLABEL_SEQUENCE_DIR", "/b", 1);
  ::setenv("CURBLABEL_OUTPUT_DIR", "/c", 1);
  c.apply_env_overrides();
  ::unsetenv("CURBLABEL_SEQUENCE_DIR");
  ::unsetenv("CURBLABEL_OUTPUT_DIR");
  CHECK(c.sequence_dir == "/b");
  CHECK(c.output_dir == "/c");
  CHECK_THROWS(PipelineConfig::load(dir.path() / "missing.json"));
}
