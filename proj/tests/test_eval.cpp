#include <random>

#include "doctest.h"

#include "curblabel/eval.hpp"
#include "support/eval_oracle.hpp"

using namespace curblabel;

namespace {

Mask random_mask(std::mt19937_64& rng, double density, int size = 64) {
  std::bernoulli_distribution on(density);
  Mask m(size, size);
  for (auto& v : m.data) v = on(rng);
  return m;
}

Mask row_segment(int row, int c0, int c1, int size = 64) {
  Mask m(size, size);
  for (int c = c0; c < c1; ++c) m.at(c, row) = 1;
  return m;
}

}  // namespace

TEST_CASE("f1 score") {
  CHECK(f1_score(1.0, 1.0) == 1.0);
  CHECK(f1_score(0.0, 0.0) == 0.0);
  CHECK(f1_score(0.5, 1.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("binary metrics match the all-pairs oracle") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    const Mask pred = random_mask(rng, 0.03);
    const Mask gt = random_mask(rng, 0.03);
    for (int tol = 0; tol <= 2; ++tol) {
      for (bool euclid : {false, true}) {
        const auto nb = euclid ? Neighborhood::Euclidean : Neighborhood::Chebyshev;
        const EvalReport r = binary_metrics(pred, gt, tol, nb);
        const auto o = testing::binary_oracle(pred, gt, tol, euclid);
        CHECK(r.tp == o.tp);
        CHECK(r.fp == o.fp);
        CHECK(r.fn == o.fn);
        CHECK(r.gt_positives == o.gt);
        CHECK(r.precision == doctest::Approx(double(o.tp) / double(o.tp + o.fp)));
        CHECK(r.recall == doctest::Approx(double(o.gt - o.fn) / double(o.gt)));
      }
    }
  }
}

TEST_CASE("binary edge conventions") {
  const Mask empty(16, 16);
  const Mask one = row_segment(3, 2, 5, 16);
  EvalReport r = binary_metrics(empty, empty, 1);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.f1 == 1.0);
  r = binary_metrics(empty, one, 1);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 0.0);
  r = binary_metrics(one, empty, 1);
  CHECK(r.precision == 0.0);
  CHECK(r.recall == 1.0);
  CHECK_THROWS(binary_metrics(Mask(16, 16), Mask(8, 8), 1));
}

TEST_CASE("one-pixel shift is inside tolerance, two pixels are not") {
  const Mask gt = row_segment(10, 5, 50);
  CHECK(binary_metrics(row_segment(11, 5, 50), gt, 1).f1 == 1.0);
  CHECK(binary_metrics(row_segment(12, 5, 50), gt, 1).f1 == 0.0);
  CHECK(binary_metrics(gt, gt, 0).f1 == 1.0);
}

TEST_CASE("metrics are symmetric and monotone in tolerance") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Mask a = random_mask(rng, 0.05);
    const Mask b = random_mask(rng, 0.05);
    double prev = -1.0;
    for (int tol = 0; tol <= 3; ++tol) {
      const EvalReport ab = binary_metrics(a, b, tol);
      const EvalReport ba = binary_metrics(b, a, tol);
      CHECK(ab.precision == doctest::Approx(ba.recall));
      CHECK(ab.recall == doctest::Approx(ba.precision));
      CHECK(ab.f1 >= prev);
      prev = ab.f1;
    }
  }
}

TEST_CASE("dilation radius neighborhoods") {
  Mask m(9, 9);
  m.at(4, 4) = 1;
  int cheb = 0;
  int disk = 0;
  for (auto v : dilate_radius(m, 2, Neighborhood::Chebyshev).data) cheb += v != 0;
  for (auto v : dilate_radius(m, 2, Neighborhood::Euclidean).data) disk += v != 0;
  CHECK(cheb == 25);
  CHECK(disk == 13);
}

TEST_CASE("instance IoU at exactly one half") {
  InstanceMask gt(32, 8);
  InstanceMask pred(32, 8);
  for (int c = 0; c < 20; ++c) gt.at(c, 4) = 1;
  for (int c = 0; c < 10; ++c) pred.at(c, 4) = 1;
  const std::vector<double> thresholds{0.5, 0.7};
  const EvalReport r = instance_metrics(pred, gt, thresholds, 0);
  REQUIRE(r.per_threshold.size() == 2);
  CHECK(r.per_threshold[0].tp == 1);
  CHECK(r.per_threshold[0].fp == 0);
  CHECK(r.per_threshold[0].fn == 0);
  CHECK(r.per_threshold[1].tp == 0);
  CHECK(r.per_threshold[1].fp == 1);
  CHECK(r.per_threshold[1].fn == 1);
  CHECK(r.tp == 1);
}

TEST_CASE("instance IoU table matches brute force") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pair = testing::random_instances(rng, 3, 2);
    for (int tol = 0; tol <= 2; ++tol) {
      const IouTable t = instance_iou(pair.pred, pair.gt, tol);
      const auto o = testing::iou_oracle(pair.pred, pair.gt, tol);
      REQUIRE(t.iou.size() == o.size());
      for (std::size_t i = 0; i < o.size(); ++i) {
        REQUIRE(t.iou[i].size() == o[i].size());
        for (std::size_t j = 0; j < o[i].size(); ++j) CHECK(t.iou[i][j] == doctest::Approx(o[i][j]));
      }
    }
  }
}

TEST_CASE("greedy matching equals exhaustive assignment") {
  std::mt19937_64 rng(77);
  const std::vector<double> thresholds{0.5, 0.7};
  for (int trial = 0; trial < 50; ++trial) {
    const auto pair = testing::random_instances(rng, 2 + trial % 3, trial % 2);
    const int tol = trial % 3;
    const EvalReport r = instance_metrics(pair.pred, pair.gt, thresholds, tol);
    const auto o = testing::iou_oracle(pair.pred, pair.gt, tol);
    const std::size_t n_pred = o.size();
    const std::size_t n_gt = o.empty() ? testing::dilated_instances(pair.gt, tol).size() : o[0].size();
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      const std::size_t best = testing::exhaustive_tp(o, thresholds[k]);
      CHECK(r.per_threshold[k].tp == best);
      CHECK(r.per_threshold[k].fp == n_pred - best);
      CHECK(r.per_threshold[k].fn == n_gt - best);
    }
  }
}

TEST_CASE("combining reports sums counts") {
  const Mask gt = row_segment(10, 5, 50);
  const std::vector<EvalReport> parts{binary_metrics(gt, gt, 1), binary_metrics(row_segment(30, 0, 10), gt, 1)};
  const EvalReport all = combine_binary(parts);
  CHECK(all.tp == 45);
  CHECK(all.fp == 10);
  CHECK(all.fn == 45);
  CHECK(all.precision == doctest::Approx(45.0 / 55.0));
  CHECK(all.recall == doctest::Approx(0.5));
}

TEST_CASE("dataset statistics") {
  std::vector<FrameAnnotation> anns(2);
  for (int k = 0; k < 4; ++k) {
    CurbPolyline c;
    c.instance_id = static_cast<InstanceId>(k + 1);
    for (int i = 0; i < 10; ++i) c.points.push_back({0.1 * i, double(k), 0.0});
    anns[k % 2].curbs.push_back(c);
  }
  const DatasetStats s = dataset_stats(anns);
  CHECK(s.frames == 2);
  CHECK(s.instances == 4);
  CHECK(s.points == 40);
  CHECK(dataset_stats({}) == DatasetStats{});
}

TEST_CASE("report formatting") {
  const EvalReport r = binary_metrics(row_segment(1, 0, 4, 8), row_segment(1, 0, 4, 8), 1);
  const std::string text = format_report(r);
  CHECK(text.find("precision") != std::string::npos);
  CHECK(text.find("f1") != std::string::npos);
}
