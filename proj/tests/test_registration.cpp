#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "syncvision/error.hpp"
#include "syncvision/registration.hpp"

using namespace syncvision;

namespace {

std::vector<Correspondence> exact_corrs(const Homography& h, int n, Rng& rng, double w = 512, double hh = 512) {
  std::vector<Correspondence> c;
  for (int i = 0; i < n; ++i) {
    const Point2 p{rng.uniform(0, w), rng.uniform(0, hh)};
    c.push_back({p, oracle::apply(h, p)});
  }
  return c;
}

}  // namespace

// -------------------------------------------------------------------- DLT

TEST(Dlt, IdentityAndTranslation) {
  const std::vector<Correspondence> sq{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{1, 1}, {1, 1}}, {{0, 1}, {0, 1}}};
  EXPECT_LT(canonical_distance(estimate_dlt(sq), Homography::identity()), 1e-9);
  std::vector<Correspondence> t = sq;
  for (auto& c : t) c.p2 = {c.p1.x + 5, c.p1.y - 2};
  EXPECT_LT(canonical_distance(estimate_dlt(t), Homography::translation(5, -2)), 1e-9);
}

TEST(Dlt, RecoversRandomHomographies) {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const Homography h = oracle::random_homography(rng, 512, 512);
    const auto c = exact_corrs(h, 20, rng);
    EXPECT_LT(oracle::relative_error(estimate_dlt(c), h), 1e-6) << trial;
  }
}

TEST(Dlt, SimilarityOfCoordinatesDoesNotMatter) {
  Rng rng(11);
  const Homography h = oracle::random_homography(rng, 512, 512);
  auto c = exact_corrs(h, 12, rng);
  const Homography a = estimate_dlt(c);
  // Scaling both frames by 10 conjugates H by diag(10, 10, 1).
  for (auto& x : c) {
    x.p1 = {x.p1.x * 10, x.p1.y * 10};
    x.p2 = {x.p2.x * 10, x.p2.y * 10};
  }
  const Homography s{{10, 0, 0, 0, 10, 0, 0, 0, 1}}, si{{0.1, 0, 0, 0, 0.1, 0, 0, 0, 1}};
  EXPECT_LT(oracle::relative_error(estimate_dlt(c), compose(s, compose(a, si))), 1e-8);
}

TEST(Dlt, RejectsDegenerateInputs) {
  const std::vector<Correspondence> three{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  EXPECT_THROW(estimate_dlt(three), std::invalid_argument);
  std::vector<Correspondence> line;
  for (int i = 0; i < 6; ++i) line.push_back({{double(i), 2.0 * i}, {double(i), 2.0 * i}});
  EXPECT_THROW(estimate_dlt(line), DegenerateGeometry);
}

// ----------------------------------------------------------------- RANSAC

TEST(Ransac, SixtyFortyOutliers) {
  int pass = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Rng rng(100 + trial);
    const Homography h = oracle::random_homography(rng, 512, 512);
    auto c = exact_corrs(h, 60, rng);
    for (auto& x : c) x.p2 = {x.p2.x + rng.normal(0, 0.5), x.p2.y + rng.normal(0, 0.5)};
    for (int i = 0; i < 40; ++i) c.push_back({{rng.uniform(0, 512), rng.uniform(0, 512)}, {rng.uniform(0, 512), rng.uniform(0, 512)}});
    RansacConfig cfg;
    cfg.seed = trial;
    const auto r = ransac_homography(c, cfg);
    EXPECT_GE(r.inlier_count, 55u);
    pass += oracle::corner_error(r.h, h, 512, 512) < 1.5;
  }
  EXPECT_GE(pass, 9);
}

TEST(Ransac, ExactDataAllInliersAndMaskMatchesCount) {
  Rng rng(12);
  const Homography h = oracle::random_homography(rng, 512, 512);
  const auto c = exact_corrs(h, 30, rng);
  const auto r = ransac_homography(c, {});
  EXPECT_EQ(r.inlier_count, 30u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(r.inliers.begin(), r.inliers.end(), 1)), r.inlier_count);
  EXPECT_LT(oracle::relative_error(r.h, h), 1e-6);
  ASSERT_FALSE(r.hypothesis_inliers.empty());
  EXPECT_EQ(r.hypothesis_inliers.size(), static_cast<std::size_t>(r.iterations));
  for (auto k : r.hypothesis_inliers) EXPECT_GE(r.inlier_count, k);
}

TEST(Ransac, DeterministicPerSeed) {
  Rng rng(13);
  const Homography h = oracle::random_homography(rng, 512, 512);
  auto c = exact_corrs(h, 30, rng);
  for (int i = 0; i < 30; ++i) c.push_back({{rng.uniform(0, 512), rng.uniform(0, 512)}, {rng.uniform(0, 512), rng.uniform(0, 512)}});
  RansacConfig cfg;
  const auto a = ransac_homography(c, cfg), b = ransac_homography(c, cfg);
  EXPECT_EQ(a.h.m, b.h.m);
  EXPECT_EQ(a.inliers, b.inliers);
  EXPECT_EQ(a.hypothesis_inliers, b.hypothesis_inliers);
  for (auto k : a.hypothesis_inliers) EXPECT_GE(a.inlier_count, k);
}

TEST(Ransac, FailureModes) {
  const std::vector<Correspondence> three{{{0, 0}, {0, 0}}, {{1, 0}, {1, 0}}, {{0, 1}, {0, 1}}};
  EXPECT_THROW(ransac_homography(three, {}), TooFewMatches);
  std::vector<Correspondence> line;
  for (int i = 0; i < 10; ++i) line.push_back({{double(i), double(i)}, {double(i), double(i)}});
  EXPECT_THROW(ransac_homography(line, {}), NoConsensus);
  RansacConfig bad;
  bad.confidence = 1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

// ------------------------------------------------------- transform helpers

TEST(Homography, ApplyInvertRoundTrip) {
  Rng rng(14);
  const Homography h = oracle::random_homography(rng, 512, 512);
  const Homography hi = invert(h);
  for (int i = 0; i < 100; ++i) {
    const Point2 p{rng.uniform(0, 512), rng.uniform(0, 512)};
    const Point2 q = apply_homography(hi, apply_homography(h, p));
    EXPECT_NEAR(q.x, p.x, 1e-8);
    EXPECT_NEAR(q.y, p.y, 1e-8);
  }
  const Homography proj{{1, 0, 0, 0, 1, 0, 1, 0, 0}};
  EXPECT_THROW(apply_homography(proj, {0, 3}), PointAtInfinity);
  EXPECT_THROW(invert(Homography{{1, 2, 3, 2, 4, 6, 0, 0, 1}}), DegenerateGeometry);
}

TEST(Homography, CanonicalFormIsScaleFree) {
  Homography h{{2, 0.1, 3, -0.2, 1.5, 4, 1e-3, 0, 1}};
  Homography s = h;
  for (double& v : s.m) v *= -7.5;
  EXPECT_LT(canonical_distance(h, s), 1e-12);
  double n = 0;
  for (double v : canonicalize(h).m) n += v * v;
  EXPECT_NEAR(n, 1.0, 1e-12);
  EXPECT_THROW(canonicalize(Homography{{0, 0, 0, 0, 0, 0, 0, 0, 0}}), DegenerateGeometry);
}

TEST(Homography, ReprojectionErrorIsEuclidean) {
  const Correspondence c{{0, 0}, {3, 4}};
  EXPECT_DOUBLE_EQ(reprojection_error(Homography::identity(), c), 5.0);
  EXPECT_DOUBLE_EQ(mean_corner_error(Homography::translation(3, 4), Homography::identity(), 10, 10), 5.0);
}

// ------------------------------------------------------------------- warp

TEST(Warp, IdentityAndTranslation) {
  Rng rng(15);
  const Image img = oracle::random_image(16, 16, rng);
  const auto id = warp_perspective(img, Homography::identity(), 16, 16);
  EXPECT_EQ(id.image, img);
  EXPECT_EQ(std::count(id.mask.begin(), id.mask.end(), 1), 256);

  const auto t = warp_perspective(img, Homography::translation(3, 2), 16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      const bool inside = x >= 3 && y >= 2;
      EXPECT_EQ(t.mask[y * 16 + x], inside ? 1 : 0) << x << "," << y;
      if (inside) EXPECT_FLOAT_EQ(t.image.at(x, y), img.at(x - 3, y - 2));
      else EXPECT_EQ(t.image.at(x, y), 0.0f);
    }
}

TEST(Warp, MaskIsPreimageInsideSource) {
  Rng rng(16);
  const Image img = oracle::random_image(16, 16, rng);
  const Homography h{{1.1, 0.2, -1, -0.1, 0.9, 2, 0.004, -0.003, 1}};
  const auto w = warp_perspective(img, h, 20, 18);
  EXPECT_EQ(w.image.width(), 20);
  const Homography hi = invert(h);
  for (int y = 0; y < 18; ++y)
    for (int x = 0; x < 20; ++x) {
      const Point2 s = oracle::apply(hi, {double(x), double(y)});
      const bool in = s.x >= 0 && s.y >= 0 && s.x <= 15 && s.y <= 15;
      EXPECT_EQ(w.mask[y * 20 + x], in ? 1 : 0) << x << "," << y;
      if (in) EXPECT_NEAR(w.image.at(x, y), sample_bilinear(img, s.x, s.y), 1e-6);
    }
}
