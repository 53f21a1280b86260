#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "syncvision/features.hpp"
#include "syncvision/synthbench.hpp"

using namespace syncvision;

namespace {

constexpr double kPi = std::numbers::pi;

Image crater_scene(int size, std::uint64_t seed) {
  SceneConfig sc = SceneConfig{}.scaled_to(size);
  sc.seed = seed;
  return generate_crater_scene(sc);
}

// (x, y) -> (n-1-y, x): a +90 degree turn in y-down image axes.
Image rotate90(const Image& img) {
  const int n = img.width();
  Image out(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) out.set(n - 1 - y, x, img.at(x, y));
  return out;
}

double angle_diff(double a, double b) {
  double d = std::fmod(a - b, 2 * kPi);
  if (d < -kPi) d += 2 * kPi;
  if (d > kPi) d -= 2 * kPi;
  return std::abs(d);
}

void expect_valid_keypoints(const std::vector<Keypoint>& kps, const Image& img) {
  for (const auto& k : kps) {
    EXPECT_GE(k.x, 0.0);
    EXPECT_LT(k.x, img.width());
    EXPECT_GE(k.y, 0.0);
    EXPECT_LT(k.y, img.height());
    EXPECT_GE(k.orientation, 0.0);
    EXPECT_LT(k.orientation, 2 * kPi);
    EXPECT_GE(k.response, 0.0);
  }
}

}  // namespace

// ------------------------------------------------------------------- FAST

TEST(Fast, ConstantImageHasNoCorners) { EXPECT_TRUE(detect_fast(Image(32, 32, 0.4f), 0.1).empty()); }

TEST(Fast, TooSmallImageIsEmpty) { EXPECT_TRUE(detect_fast(Image(6, 6), 0.1).empty()); }

TEST(Fast, SquareCornersAreFound) {
  Image img(32, 32);
  for (int y = 13; y < 18; ++y)
    for (int x = 13; x < 18; ++x) img.set(x, y, 1.0f);
  const auto kps = detect_fast(img, 0.1);
  const auto ref = oracle::fast_corners(img, 0.1);
  ASSERT_EQ(kps.size(), ref.size());
  for (auto [cx, cy] : {std::pair{13, 13}, {17, 13}, {13, 17}, {17, 17}}) {
    bool near = false;
    for (const auto& k : kps) near = near || (std::abs(k.x - cx) <= 1.5 && std::abs(k.y - cy) <= 1.5);
    EXPECT_TRUE(near) << cx << "," << cy;
  }
}

TEST(Fast, EqualsExhaustiveOracleOnRandomImages) {
  Rng rng(2024);
  for (int i = 0; i < 20; ++i) {
    const Image img = oracle::random_image(32, 32, rng);
    const auto kps = detect_fast(img, 0.1);
    const auto ref = oracle::fast_corners(img, 0.1);
    ASSERT_EQ(kps.size(), ref.size()) << "image " << i;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      EXPECT_EQ(kps[k].x, ref[k].x);
      EXPECT_EQ(kps[k].y, ref[k].y);
      EXPECT_DOUBLE_EQ(kps[k].response, ref[k].score);
    }
    for (int y = 3; y < 29; ++y)
      for (int x = 3; x < 29; ++x) ASSERT_DOUBLE_EQ(fast_score(img, x, y, 0.1), oracle::segment_score(img, x, y, 0.1));
  }
}

// ------------------------------------------------------------ orientation

TEST(Orientation, IntensityCentroidFollowsGradient) {
  Image rx(41, 41), ry(41, 41);
  for (int y = 0; y < 41; ++y)
    for (int x = 0; x < 41; ++x) {
      rx.set(x, y, x / 40.0f);
      ry.set(x, y, y / 40.0f);
    }
  Keypoint kp;
  kp.x = kp.y = 20;
  EXPECT_NEAR(angle_diff(orientation_intensity_centroid(rx, kp, 15), 0.0), 0.0, 0.05);
  EXPECT_NEAR(orientation_intensity_centroid(ry, kp, 15), kPi / 2, 0.05);
  EXPECT_EQ(orientation_intensity_centroid(Image(41, 41, 0.6f), kp, 15), 0.0);
}

// ----------------------------------------------------------------- rBRIEF

TEST(Brief, PatternIsSeededAndClipped) {
  OrbConfig cfg;
  const auto a = make_brief_pattern(cfg);
  const auto b = make_brief_pattern(cfg);
  ASSERT_EQ(a.size(), 256u);
  const double half = cfg.patch_size / 2;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].px, b[i].px);
    EXPECT_EQ(a[i].qy, b[i].qy);
    for (double v : {a[i].px, a[i].py, a[i].qx, a[i].qy}) EXPECT_LE(std::abs(v), half);
  }
  cfg.pattern_seed += 1;
  const auto c = make_brief_pattern(cfg);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].px != c[i].px;
  EXPECT_TRUE(differs);
}

TEST(Brief, IdenticalKeypointsGiveIdenticalDescriptors) {
  const Image img = gaussian_blur(oracle::textured_image(96, 96, 4), 2.0);
  Keypoint kp;
  kp.x = 48;
  kp.y = 40;
  kp.orientation = 1.1;
  const OrbConfig cfg;
  EXPECT_EQ(hamming_distance(compute_rbrief(img, kp, cfg), compute_rbrief(img, kp, cfg)), 0);
  OrbDescriptor zero, ones;
  for (int k = 0; k < 256; ++k) ones.set_bit(k);
  EXPECT_EQ(hamming_distance(zero, ones), 256);
  EXPECT_EQ(ones.popcount(), 256);
}

TEST(Brief, SteeredDescriptorSurvivesQuarterTurn) {
  const int n = 128;
  const Image img = oracle::textured_image(n, n, 7);
  const Image rot = rotate90(img);
  const Image s1 = gaussian_blur(img, 2.0), s2 = gaussian_blur(rot, 2.0);
  const OrbConfig cfg;
  int checked = 0;
  for (int y = 40; y <= 88; y += 12)
    for (int x = 40; x <= 88; x += 12) {
      Keypoint a;
      a.x = x;
      a.y = y;
      a.orientation = orientation_intensity_centroid(img, a, 15);
      Keypoint b;
      b.x = n - 1 - y;
      b.y = x;
      b.orientation = orientation_intensity_centroid(rot, b, 15);
      EXPECT_NEAR(angle_diff(b.orientation, a.orientation + kPi / 2), 0.0, 1e-6);
      EXPECT_LE(hamming_distance(compute_rbrief(s1, a, cfg), compute_rbrief(s2, b, cfg)), 64);
      ++checked;
    }
  EXPECT_EQ(checked, 25);
}

// -------------------------------------------------------------------- ORB

TEST(Orb, ConstantImageHasNoFeatures) {
  const auto f = detect_orb(Image(128, 128, 0.5f));
  EXPECT_TRUE(f.keypoints.empty());
  EXPECT_TRUE(f.descriptors.empty());
}

TEST(Orb, CraterSceneCountAndDeterminism) {
  const Image img = crater_scene(256, 9);
  const auto a = detect_orb(img);
  const auto b = detect_orb(img);
  EXPECT_GE(a.keypoints.size(), 50u);
  EXPECT_LE(a.keypoints.size(), 500u);
  EXPECT_EQ(a.keypoints.size(), a.descriptors.size());
  ASSERT_EQ(a.descriptors.size(), b.descriptors.size());
  for (std::size_t i = 0; i < a.descriptors.size(); ++i) {
    EXPECT_EQ(a.descriptors[i], b.descriptors[i]);
    EXPECT_EQ(a.keypoints[i].x, b.keypoints[i].x);
  }
  expect_valid_keypoints(a.keypoints, img);
  for (const auto& k : a.keypoints) EXPECT_EQ(k.source, FeatureSource::Orb);
}

TEST(Orb, RespectsFeatureBudget) {
  OrbConfig cfg;
  cfg.n_features = 40;
  EXPECT_LE(detect_orb(crater_scene(256, 10), cfg).keypoints.size(), 40u);
  cfg.scale_factor = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = OrbConfig{};
  cfg.patch_size = 30;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

// ------------------------------------------------------------------- SIFT

TEST(Sift, ConstantImageHasNoKeypoints) { EXPECT_TRUE(detect_sift(Image(64, 64, 0.3f)).keypoints.empty()); }

TEST(Sift, BlobIsFoundAtTheDogExtremum) {
  const int n = 128;
  const double c = 63.5, sb = 4.0;
  Image img(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      img.set(x, y, static_cast<float>(std::exp(-((x - c) * (x - c) + (y - c) * (y - c)) / (2 * sb * sb))));

  // Oracle: scan |DoG| over a dense ladder of scales with an independent
  // blur and take the global extremum location.
  auto blur = [&](double s) {
    const auto k = oracle::kernel(s);
    const int r = static_cast<int>(k.size() / 2);
    std::vector<double> tmp(n * n), out(n * n);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double a = 0;
        for (int i = -r; i <= r; ++i) a += k[i + r] * img.at(std::clamp(x + i, 0, n - 1), y);
        tmp[y * n + x] = a;
      }
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double a = 0;
        for (int i = -r; i <= r; ++i) a += k[i + r] * tmp[std::clamp(y + i, 0, n - 1) * n + x];
        out[y * n + x] = a;
      }
    return out;
  };
  double best = -1;
  int bx = 0, by = 0;
  const double kstep = std::pow(2.0, 1.0 / 3.0);
  for (double s = 1.6; s < 12; s *= kstep) {
    const auto a = blur(s), b = blur(s * kstep);
    for (int i = 0; i < n * n; ++i)
      if (std::abs(b[i] - a[i]) > best) {
        best = std::abs(b[i] - a[i]);
        bx = i % n;
        by = i / n;
      }
  }
  ASSERT_LE(std::hypot(bx - c, by - c), 1.0);

  const auto f = detect_sift(img);
  ASSERT_FALSE(f.keypoints.empty());
  double nearest = 1e9;
  for (const auto& k : f.keypoints) nearest = std::min(nearest, std::hypot(k.x - bx, k.y - by));
  EXPECT_LE(nearest, 2.0);
}

TEST(Sift, DescriptorsAreUnitAndClamped) {
  const Image img = crater_scene(256, 12);
  const auto f = detect_sift(img);
  ASSERT_GT(f.keypoints.size(), 0u);
  ASSERT_EQ(f.keypoints.size(), f.descriptors.size());
  for (const auto& d : f.descriptors) {
    double n2 = 0, mx = 0;
    for (float v : d.values) {
      EXPECT_GE(v, 0.0f);
      n2 += static_cast<double>(v) * v;
      mx = std::max(mx, static_cast<double>(v));
    }
    EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-5);
    EXPECT_LE(mx, 0.2 + 1e-5);
  }
  expect_valid_keypoints(f.keypoints, img);
}

TEST(Sift, NormalizeAndClampReachesBothConstraints) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    std::array<float, kSiftDescriptorSize> v{};
    const int nz = 25 + static_cast<int>(rng.below(100));
    for (int i = 0; i < nz; ++i) v[rng.below(128)] = static_cast<float>(rng.uniform() * (rng.uniform() < 0.1 ? 20 : 1));
    int count = 0;
    for (float x : v) count += x > 0;
    const bool ok = normalize_and_clamp(v, 0.2);
    if (count < 25) {
      EXPECT_FALSE(ok);
      continue;
    }
    ASSERT_TRUE(ok);
    double n2 = 0;
    for (float x : v) {
      n2 += static_cast<double>(x) * x;
      EXPECT_LE(x, 0.2 + 1e-5);
    }
    EXPECT_NEAR(std::sqrt(n2), 1.0, 1e-5);
  }
  std::array<float, kSiftDescriptorSize> spike{};
  spike[3] = 1.0f;
  EXPECT_FALSE(normalize_and_clamp(spike, 0.2));
}

TEST(Sift, KeypointCountIsOffsetInvariant) {
  const Image base = crater_scene(256, 13);
  std::vector<float> a(base.size()), b(base.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = 0.05f + 0.8f * base.pixels()[i];
    b[i] = a[i] + 0.1f;
  }
  EXPECT_EQ(detect_sift(Image(256, 256, a)).keypoints.size(), detect_sift(Image(256, 256, b)).keypoints.size());
}

TEST(Sift, RotationCovariance) {
  const int n = 256;
  const Image img = crater_scene(n, 14);
  const auto f1 = detect_sift(img);
  const auto f2 = detect_sift(rotate90(img));
  ASSERT_GT(f1.keypoints.size(), 0u);
  std::size_t hits = 0;
  for (const auto& k : f1.keypoints) {
    const double rx = n - 1 - k.y, ry = k.x;
    for (const auto& q : f2.keypoints)
      if (std::hypot(q.x - rx, q.y - ry) <= 2.0) {
        ++hits;
        break;
      }
  }
  EXPECT_GE(2 * hits, f1.keypoints.size()) << hits << " of " << f1.keypoints.size();
}

TEST(Sift, ConfigValidation) {
  SiftConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.edge_ratio = 1.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SiftConfig{};
  cfg.sigma0 = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}
