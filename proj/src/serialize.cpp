#include "syncvision/serialize.hpp"

#include <cmath>
#include <stdexcept>

#include "syncvision/error.hpp"

namespace syncvision {

Json metric_value(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

namespace {

Json optional_metric(const std::optional<double>& v) { return v ? metric_value(*v) : Json(nullptr); }

}  // namespace

Json homography_json(const Homography& h) {
  Json a = Json::array();
  for (double v : h.m) a.push_back(v);
  return a;
}

Homography homography_from_json(const Json& j) {
  const Json& a = j.is_object() ? j.at("homography") : j;
  if (!a.is_array() || a.size() != 9) throw FormatError("homography must be a 9-element array");
  Homography h;
  for (std::size_t i = 0; i < 9; ++i) {
    if (!a[i].is_number()) throw FormatError("homography entries must be numbers");
    h.m[i] = a[i].get<double>();
  }
  return h;
}

Json config_json(const PipelineConfig& cfg) {
  Json j;
  j["sift"] = {{"octaves", cfg.sift.octaves},
               {"scales_per_octave", cfg.sift.scales_per_octave},
               {"sigma0", cfg.sift.sigma0},
               {"contrast_threshold", cfg.sift.contrast_threshold},
               {"edge_ratio", cfg.sift.edge_ratio},
               {"orientation_bins", cfg.sift.orientation_bins},
               {"peak_ratio", cfg.sift.peak_ratio},
               {"input_sigma", cfg.sift.input_sigma},
               {"descriptor_clamp", cfg.sift.descriptor_clamp},
               {"double_base", cfg.sift.double_base}};
  j["orb"] = {{"n_features", cfg.orb.n_features},
              {"pyramid_levels", cfg.orb.pyramid_levels},
              {"scale_factor", cfg.orb.scale_factor},
              {"fast_threshold", cfg.orb.fast_threshold},
              {"patch_size", cfg.orb.patch_size},
              {"brief_pairs", cfg.orb.brief_pairs},
              {"pattern_seed", cfg.orb.pattern_seed},
              {"brief_smoothing_sigma", cfg.orb.brief_smoothing_sigma},
              {"harris_k", cfg.orb.harris_k},
              {"harris_block", cfg.orb.harris_block}};
  j["match"] = {{"ratio", cfg.match.ratio},
                {"float_ratio_test", cfg.match.float_ratio_test},
                {"float_cross_check", cfg.match.float_cross_check},
                {"binary_ratio_test", cfg.match.binary_ratio_test},
                {"binary_cross_check", cfg.match.binary_cross_check}};
  j["ransac"] = {{"inlier_threshold", cfg.ransac.inlier_threshold},
                 {"max_iterations", cfg.ransac.max_iterations},
                 {"confidence", cfg.ransac.confidence},
                 {"seed", cfg.ransac.seed}};
  j["ssim"] = {{"k1", cfg.ssim.k1},
               {"k2", cfg.ssim.k2},
               {"scale", to_string(cfg.ssim.scale)},
               {"mode", to_string(cfg.ssim.mode)},
               {"window", cfg.ssim.window},
               {"window_sigma", cfg.ssim.window_sigma}};
  j["pca_dim"] = cfg.pca_dim;
  return j;
}

Json report_json(const RegistrationReport& r, bool timings) {
  Json j;
  j["schema"] = kReportSchema;
  j["method"] = to_string(r.method);
  j["interp"] = r.interp ? Json(to_string(*r.interp)) : Json("NONE");
  j["keypoints_1"] = r.keypoints_1;
  j["keypoints_2"] = r.keypoints_2;
  j["matches"] = r.matches;
  j["sift_matches"] = r.sift_matches;
  j["orb_matches"] = r.orb_matches;
  j["pca_padded"] = r.pca_padded;
  j["inliers"] = r.inliers;
  j["homography"] = r.homography ? homography_json(*r.homography) : Json(nullptr);
  j["ssim"] = optional_metric(r.ssim);
  j["psnr_db"] = optional_metric(r.psnr_db);
  j["mse"] = optional_metric(r.mse);
  j["status"] = to_string(r.status);
  j["seed"] = r.config.seed();
  j["config"] = config_json(r.config);
  if (timings) {
    const StageTimings& t = r.runtime_ms;
    j["runtime_ms"] = {{"upscale", t.upscale_ms}, {"detect", t.detect_ms}, {"match", t.match_ms},
                       {"ransac", t.ransac_ms},   {"warp", t.warp_ms},     {"evaluate", t.evaluate_ms}};
  }
  return j;
}

namespace {

Json keypoint_fields(const Keypoint& kp) {
  return {{"x", kp.x},
          {"y", kp.y},
          {"octave", kp.octave},
          {"sigma", kp.sigma},
          {"orientation", kp.orientation},
          {"response", kp.response},
          {"source", to_string(kp.source)}};
}

}  // namespace

Json keypoint_json(const Keypoint& kp, const SiftDescriptor& d) {
  Json j = keypoint_fields(kp);
  j["descriptor"] = d.values;
  return j;
}

std::string to_hex(const OrbDescriptor& d) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s;
  s.reserve(2 * d.bits.size());
  for (std::uint8_t b : d.bits) {
    s.push_back(digits[b >> 4]);
    s.push_back(digits[b & 15]);
  }
  return s;
}

Json keypoint_json(const Keypoint& kp, const OrbDescriptor& d) {
  Json j = keypoint_fields(kp);
  j["descriptor"] = to_hex(d);
  return j;
}

Json matches_json(std::span<const MatchPair> matches) {
  Json a = Json::array();
  for (const MatchPair& m : matches) a.push_back(Json::array({m.query_index, m.train_index, m.distance}));
  return a;
}

Json scene_json(const SceneConfig& c) {
  return {{"size", c.size},
          {"n_craters", c.n_craters},
          {"min_radius", c.min_radius},
          {"max_radius", c.max_radius},
          {"depth_ratio", c.depth_ratio},
          {"roughness", c.roughness},
          {"sun_elevation", c.sun_elevation},
          {"sun_azimuth", c.sun_azimuth},
          {"albedo", c.albedo},
          {"ambient", c.ambient},
          {"noise_sigma", c.noise_sigma},
          {"seed", c.seed}};
}

SceneConfig scene_from_json(const Json& j) {
  SceneConfig c;
  try {
    c.size = j.value("size", c.size);
    c.n_craters = j.value("n_craters", c.n_craters);
    c.min_radius = j.value("min_radius", c.min_radius);
    c.max_radius = j.value("max_radius", c.max_radius);
    c.depth_ratio = j.value("depth_ratio", c.depth_ratio);
    c.roughness = j.value("roughness", c.roughness);
    c.sun_elevation = j.value("sun_elevation", c.sun_elevation);
    c.sun_azimuth = j.value("sun_azimuth", c.sun_azimuth);
    c.albedo = j.value("albedo", c.albedo);
    c.ambient = j.value("ambient", c.ambient);
    c.noise_sigma = j.value("noise_sigma", c.noise_sigma);
    c.seed = j.value("seed", c.seed);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("scene config: ") + e.what());
  }
  c.validate();
  return c;
}

Json perturb_json(const PerturbConfig& c) {
  return {{"max_rotation", c.max_rotation},
          {"max_translation", c.max_translation},
          {"max_projective", c.max_projective},
          {"gain_min", c.gain_min},
          {"gain_max", c.gain_max},
          {"bias_min", c.bias_min},
          {"bias_max", c.bias_max},
          {"noise_sigma", c.noise_sigma},
          {"seed", c.seed}};
}

Json bbox_json(const geo::PixelRect& r) { return {{"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}}; }

Json bench_json(const BenchResult& result, const PipelineConfig& cfg) {
  Json j;
  j["schema"] = kReportSchema;
  j["seed"] = cfg.seed();
  j["pairs"] = result.pair_names;
  Json rows = Json::array();
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    const BenchRow& row = result.rows[r];
    Json status_counts = Json::object();
    Json runs = Json::array();
    for (std::size_t k = 0; k < result.reports[r].size(); ++k) {
      const RegistrationReport& rep = result.reports[r][k];
      const std::string s(to_string(rep.status));
      status_counts[s] = status_counts.value(s, 0) + 1;
      runs.push_back({{"pair", result.pair_names[k]},
                      {"status", s},
                      {"matches", rep.matches},
                      {"inliers", rep.inliers},
                      {"ssim", optional_metric(rep.ssim)},
                      {"psnr_db", optional_metric(rep.psnr_db)},
                      {"homography", rep.homography ? homography_json(*rep.homography) : Json(nullptr)}});
    }
    rows.push_back({{"method", to_string(row.method)},
                    {"interp", to_string(row.interp)},
                    {"ssim", metric_value(row.ssim)},
                    {"psnr_db", metric_value(row.psnr_db)},
                    {"reproj_px", metric_value(row.reproj_px)},
                    {"status", row.status},
                    {"runs", row.runs},
                    {"ok_runs", row.ok_runs},
                    {"status_counts", status_counts},
                    {"per_pair", runs}});
  }
  j["rows"] = rows;
  j["config"] = config_json(cfg);
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace syncvision
