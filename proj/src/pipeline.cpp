#include "syncvision/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "syncvision/error.hpp"

namespace syncvision {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<MatchPair> match_pools(const DescriptorPool& a, const DescriptorPool& b, const MatchConfig& cfg) {
  const bool is_float = a.modality == Modality::Float;
  const bool ratio = is_float ? cfg.float_ratio_test : cfg.binary_ratio_test;
  const bool cross = is_float ? cfg.float_cross_check : cfg.binary_cross_check;
  std::vector<MatchPair> matches;
  if (ratio) {
    matches = ratio_test_filter(knn_match2(a, b), cfg.ratio);
    if (cross) {
      const std::vector<MatchPair> mutual = match_bruteforce(a, b, true);
      std::vector<MatchPair> kept;
      for (const MatchPair& m : matches)
        for (const MatchPair& n : mutual)
          if (n.query_index == m.query_index && n.train_index == m.train_index) {
            kept.push_back(m);
            break;
          }
      matches = std::move(kept);
    }
  } else {
    matches = match_bruteforce(a, b, cross);
  }
  return matches;
}

void append_correspondences(const std::vector<MatchPair>& matches, const DescriptorPool& a, const DescriptorPool& b,
                            const std::vector<Keypoint>& kp1, const std::vector<Keypoint>& kp2,
                            std::vector<Correspondence>& out) {
  for (const MatchPair& m : matches) {
    const Keypoint& k1 = kp1[a.keypoint_refs[m.query_index]];
    const Keypoint& k2 = kp2[b.keypoint_refs[m.train_index]];
    out.push_back({{k1.x, k1.y}, {k2.x, k2.y}});
  }
}

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Sift: return "SIFT";
    case Method::Orb: return "ORB";
    case Method::IntFeat: return "INTFEAT";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "sift") return Method::Sift;
  if (s == "orb") return Method::Orb;
  if (s == "intfeat") return Method::IntFeat;
  throw std::invalid_argument("unknown method: " + std::string(name));
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "OK";
    case Status::TooFewFeatures: return "TOO_FEW_FEATURES";
    case Status::NoConsensus: return "NO_CONSENSUS";
    case Status::Degenerate: return "DEGENERATE";
  }
  return "?";
}

int exit_code(Status s) {
  switch (s) {
    case Status::Ok: return 0;
    case Status::TooFewFeatures: return 2;
    case Status::NoConsensus: return 3;
    case Status::Degenerate: return 4;
  }
  return 1;
}

void detect_features(const Image& img, Method method, const PipelineConfig& cfg, DetectedFeatures& cache) {
  if (method != Method::Orb && !cache.sift) cache.sift = detect_sift(img, cfg.sift);
  if (method != Method::Sift && !cache.orb) cache.orb = detect_orb(img, cfg.orb);
}

EvaluationMetrics evaluate(const Image& registered, const Image& reference, PixelMask mask, const SsimParams& params) {
  EvaluationMetrics m;
  m.mse = syncvision::mse(registered, reference, params.scale, mask);
  m.psnr_db = psnr_from_mse(m.mse, params.scale);
  SsimParams p = params;
  if (p.mode == SsimMode::Windowed && ssim_window_count(reference.width(), reference.height(), p, mask) == 0)
    p.mode = SsimMode::Global;
  m.ssim = syncvision::ssim(registered, reference, p, mask);
  return m;
}

RegistrationResult register_images(const Image& img1, const Image& img2, Method method, const PipelineConfig& cfg,
                                   DetectedFeatures* cache1, DetectedFeatures* cache2) {
  RegistrationResult result;
  RegistrationReport& rep = result.report;
  rep.method = method;
  rep.config = cfg;

  auto t0 = Clock::now();
  DetectedFeatures local1, local2;
  DetectedFeatures& f1 = cache1 ? *cache1 : local1;
  DetectedFeatures& f2 = cache2 ? *cache2 : local2;
  detect_features(img1, method, cfg, f1);
  detect_features(img2, method, cfg, f2);
  rep.runtime_ms.detect_ms = elapsed_ms(t0);

  t0 = Clock::now();
  std::vector<Correspondence> corrs;
  switch (method) {
    case Method::Sift: {
      rep.keypoints_1 = f1.sift->keypoints.size();
      rep.keypoints_2 = f2.sift->keypoints.size();
      const DescriptorPool a = make_pool(*f1.sift), b = make_pool(*f2.sift);
      const auto m = match_pools(a, b, cfg.match);
      append_correspondences(m, a, b, f1.sift->keypoints, f2.sift->keypoints, corrs);
      break;
    }
    case Method::Orb: {
      rep.keypoints_1 = f1.orb->keypoints.size();
      rep.keypoints_2 = f2.orb->keypoints.size();
      const DescriptorPool a = make_pool(*f1.orb), b = make_pool(*f2.orb);
      const auto m = match_pools(a, b, cfg.match);
      append_correspondences(m, a, b, f1.orb->keypoints, f2.orb->keypoints, corrs);
      break;
    }
    case Method::IntFeat: {
      rep.keypoints_1 = f1.sift->keypoints.size() + f1.orb->keypoints.size();
      rep.keypoints_2 = f2.sift->keypoints.size() + f2.orb->keypoints.size();
      std::vector<SiftDescriptor> all;
      all.reserve(f1.sift->descriptors.size() + f2.sift->descriptors.size());
      all.insert(all.end(), f1.sift->descriptors.begin(), f1.sift->descriptors.end());
      all.insert(all.end(), f2.sift->descriptors.begin(), f2.sift->descriptors.end());
      const PcaBasis basis = fit_pca_padded(all, cfg.pca_dim);
      rep.pca_padded = basis.padded;
      const IntFeatPools p1 = build_intfeat_pools(*f1.sift, *f1.orb, basis);
      const IntFeatPools p2 = build_intfeat_pools(*f2.sift, *f2.orb, basis);
      const auto ms = match_pools(p1.sift, p2.sift, cfg.match);
      const auto mo = match_pools(p1.orb, p2.orb, cfg.match);
      rep.sift_matches = ms.size();
      rep.orb_matches = mo.size();
      append_correspondences(ms, p1.sift, p2.sift, f1.sift->keypoints, f2.sift->keypoints, corrs);
      append_correspondences(mo, p1.orb, p2.orb, f1.orb->keypoints, f2.orb->keypoints, corrs);
      break;
    }
  }
  rep.matches = corrs.size();
  rep.runtime_ms.match_ms = elapsed_ms(t0);

  if (corrs.size() < 4) {
    rep.status = Status::TooFewFeatures;
    return result;
  }

  t0 = Clock::now();
  RansacResult fit;
  try {
    fit = ransac_homography(corrs, cfg.ransac);
  } catch (const NoConsensus&) {
    rep.status = Status::NoConsensus;
    rep.runtime_ms.ransac_ms = elapsed_ms(t0);
    return result;
  } catch (const DegenerateGeometry&) {
    rep.status = Status::Degenerate;
    return result;
  }
  rep.runtime_ms.ransac_ms = elapsed_ms(t0);
  rep.inliers = fit.inlier_count;
  rep.homography = fit.h;

  t0 = Clock::now();
  WarpResult warped;
  try {
    warped = warp_perspective(img1, fit.h, img2.width(), img2.height());
  } catch (const DegenerateGeometry&) {
    rep.status = Status::Degenerate;
    return result;
  }
  rep.runtime_ms.warp_ms = elapsed_ms(t0);

  t0 = Clock::now();
  try {
    const EvaluationMetrics m = evaluate(warped.image, img2, warped.mask, cfg.ssim);
    rep.ssim = m.ssim;
    rep.psnr_db = m.psnr_db;
    rep.mse = m.mse;
  } catch (const EvaluationSkipped&) {
    // The estimated footprint misses the reference frame entirely.
    rep.status = Status::Degenerate;
    return result;
  }
  rep.runtime_ms.evaluate_ms = elapsed_ms(t0);

  rep.status = Status::Ok;
  result.registered = std::move(warped.image);
  result.mask = std::move(warped.mask);
  return result;
}

RegistrationResult upscale_register_evaluate(const Image& lowres, const Image& highres, Method method,
                                             InterpMethod interp, const PipelineConfig& cfg,
                                             DetectedFeatures* highres_cache) {
  const auto t0 = Clock::now();
  const double factor = static_cast<double>(highres.width()) / lowres.width();
  const Image up = upscale(lowres, factor, interp);
  const double up_ms = elapsed_ms(t0);
  RegistrationResult r = register_images(up, highres, method, cfg, nullptr, highres_cache);
  r.report.interp = interp;
  r.report.runtime_ms.upscale_ms = up_ms;
  return r;
}

}  // namespace syncvision
