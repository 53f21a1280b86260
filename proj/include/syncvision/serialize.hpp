#pragma once

#include <span>
#include <string>

#include <json.hpp>

#include "syncvision/descmatch.hpp"
#include "syncvision/features.hpp"
#include "syncvision/geo.hpp"
#include "syncvision/pipeline.hpp"
#include "syncvision/synthbench.hpp"

namespace syncvision {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchema = 1;

/// +inf becomes "inf", -inf "-inf", NaN null.
Json metric_value(double v);

/// Row-major 9-element array.
Json homography_json(const Homography& h);
/// Accepts a 9-element array or {"homography": [...]}.
Homography homography_from_json(const Json& j);

Json config_json(const PipelineConfig& cfg);

/// Runtimes are omitted unless `timings` is set so that reruns produce
/// byte-identical reports.
Json report_json(const RegistrationReport& r, bool timings = false);

Json keypoint_json(const Keypoint& kp, const SiftDescriptor& d);
Json keypoint_json(const Keypoint& kp, const OrbDescriptor& d);
std::string to_hex(const OrbDescriptor& d);

/// [query_index, train_index, distance] triples.
Json matches_json(std::span<const MatchPair> matches);

Json scene_json(const SceneConfig& cfg);
SceneConfig scene_from_json(const Json& j);
Json perturb_json(const PerturbConfig& cfg);

Json bbox_json(const geo::PixelRect& r);

Json bench_json(const BenchResult& result, const PipelineConfig& cfg);

/// Pretty-printed with a trailing newline.
std::string dump(const Json& j);

}  // namespace syncvision
