#include "syncvision/synthbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "syncvision/random.hpp"

namespace syncvision {

void SceneConfig::validate() const {
  if (size < 64) throw std::invalid_argument("scene size must be >= 64");
  if (n_craters < 0) throw std::invalid_argument("crater count must be >= 0");
  if (!(min_radius > 0.0 && min_radius <= max_radius)) throw std::invalid_argument("bad crater radius range");
  if (!(max_radius < size / 2.0)) throw std::invalid_argument("crater radii must be < size/2");
  if (!(sun_elevation > 0.0 && sun_elevation <= 90.0)) throw std::invalid_argument("sun elevation must be in (0, 90]");
  if (!(depth_ratio >= 0.0 && roughness >= 0.0 && noise_sigma >= 0.0))
    throw std::invalid_argument("depth, roughness and noise must be nonnegative");
  if (!(albedo >= 0.0 && ambient >= 0.0 && albedo + ambient <= 1.0 + 1e-12))
    throw std::invalid_argument("albedo + ambient must lie in [0, 1]");
}

SceneConfig SceneConfig::scaled_to(int new_size) const {
  SceneConfig c = *this;
  const double k = static_cast<double>(new_size) / size;
  c.size = new_size;
  c.min_radius = min_radius * k;
  c.max_radius = max_radius * k;
  c.roughness = roughness * k;
  return c;
}

namespace {

// Fractal value noise: lattice values every `cell` px, smoothstep blended,
// octaves halving in cell size and amplitude. Cells run from size/16 down to
// size/128 so the relief keeps its shape across raster sizes.
std::vector<float> value_noise(int size, Rng& rng, double amplitude) {
  std::vector<float> out(static_cast<std::size_t>(size) * size, 0.0f);
  if (amplitude <= 0.0) return out;
  double amp = amplitude;
  const int coarsest = std::max(2, size / 16), finest = std::max(1, size / 128);
  for (int cell = coarsest; cell >= finest; cell /= 2, amp *= 0.5) {
    const int n = size / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(n) * n);
    for (double& v : lattice) v = rng.uniform(-1.0, 1.0);
    for (int y = 0; y < size; ++y) {
      const double gy = static_cast<double>(y) / cell;
      const int iy = static_cast<int>(gy);
      double ty = gy - iy;
      ty = ty * ty * (3 - 2 * ty);
      for (int x = 0; x < size; ++x) {
        const double gx = static_cast<double>(x) / cell;
        const int ix = static_cast<int>(gx);
        double tx = gx - ix;
        tx = tx * tx * (3 - 2 * tx);
        auto L = [&](int i, int j) { return lattice[static_cast<std::size_t>(j) * n + i]; };
        const double top = L(ix, iy) * (1 - tx) + L(ix + 1, iy) * tx;
        const double bot = L(ix, iy + 1) * (1 - tx) + L(ix + 1, iy + 1) * tx;
        out[static_cast<std::size_t>(y) * size + x] += static_cast<float>(amp * (top * (1 - ty) + bot * ty));
      }
    }
  }
  return out;
}

double height_at(const std::vector<float>& h, int size, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
  const double ax = x - fx, ay = y - fy;
  auto H = [&](int i, int j) {
    i = std::clamp(i, 0, size - 1);
    j = std::clamp(j, 0, size - 1);
    return static_cast<double>(h[static_cast<std::size_t>(j) * size + i]);
  };
  return (1 - ax) * (1 - ay) * H(x0, y0) + ax * (1 - ay) * H(x0 + 1, y0) + (1 - ax) * ay * H(x0, y0 + 1) +
         ax * ay * H(x0 + 1, y0 + 1);
}

}  // namespace

SceneRender render_crater_scene(const SceneConfig& cfg) {
  cfg.validate();
  const int n = cfg.size;
  Rng rng(cfg.seed);

  // Height field: relief first, then craters, then the noise stream, so each
  // component draws from a fixed position in the seeded sequence.
  std::vector<float> height = value_noise(n, rng, cfg.roughness);
  const double log_ratio = std::log(cfg.max_radius / cfg.min_radius);
  for (int c = 0; c < cfg.n_craters; ++c) {
    const double cx = rng.uniform(0.0, n);
    const double cy = rng.uniform(0.0, n);
    const double r = cfg.min_radius * std::exp(rng.uniform() * log_ratio);
    const double depth = cfg.depth_ratio;
    const double rim = 0.1 * r;
    const double reach = 1.6 * r;
    const int x0 = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x1 = std::min(n - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y1 = std::min(n - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y0; y <= y1; ++y)
      for (int x = x0; x <= x1; ++x) {
        const double d = std::hypot(x - cx, y - cy);
        double dz = 0.0;
        if (d < r) dz -= depth * std::sqrt(r * r - d * d);
        const double u = (d - r) / (0.25 * r);
        dz += rim * std::exp(-u * u);
        height[static_cast<std::size_t>(y) * n + x] += static_cast<float>(dz);
      }
  }

  constexpr double deg = std::numbers::pi / 180.0;
  const double el = cfg.sun_elevation * deg;
  const double az = cfg.sun_azimuth * deg;
  const double sx = std::cos(el) * std::cos(az);
  const double sy = std::cos(el) * std::sin(az);
  const double sz = std::sin(el);

  SceneRender out;
  out.shadow.assign(height.size(), 0);
  const bool cast_shadows = cfg.sun_elevation < 90.0;
  if (cast_shadows) {
    const double rise = std::tan(el);
    const double max_h = *std::max_element(height.begin(), height.end());
    const double dx = std::cos(az), dy = std::sin(az);
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        const double h0 = height[static_cast<std::size_t>(y) * n + x];
        for (double t = 1.0;; t += 1.0) {
          const double ray = h0 + t * rise;
          if (ray >= max_h) break;
          const double px = x + t * dx, py = y + t * dy;
          if (px < 0 || py < 0 || px > n - 1 || py > n - 1) break;
          if (height_at(height, n, px, py) > ray) {
            out.shadow[static_cast<std::size_t>(y) * n + x] = 1;
            ++out.shadowed_pixels;
            break;
          }
        }
      }
  }

  std::vector<float> data(height.size());
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x) {
      auto H = [&](int i, int j) {
        i = std::clamp(i, 0, n - 1);
        j = std::clamp(j, 0, n - 1);
        return static_cast<double>(height[static_cast<std::size_t>(j) * n + i]);
      };
      const double hx = 0.5 * (H(x + 1, y) - H(x - 1, y));
      const double hy = 0.5 * (H(x, y + 1) - H(x, y - 1));
      const double norm = std::sqrt(hx * hx + hy * hy + 1.0);
      const double lambert = std::max(0.0, (-hx * sx - hy * sy + sz) / norm);
      const std::size_t i = static_cast<std::size_t>(y) * n + x;
      const double lit = out.shadow[i] ? 0.0 : lambert;
      double v = cfg.ambient + cfg.albedo * lit;
      if (cfg.noise_sigma > 0.0) v += rng.normal(0.0, cfg.noise_sigma);
      data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  out.image = Image(n, n, std::move(data));
  out.height = std::move(height);
  return out;
}

Image generate_crater_scene(const SceneConfig& cfg) { return render_crater_scene(cfg).image; }

double intensity_stddev(const Image& img) {
  const auto px = img.pixels();
  double mean = 0.0;
  for (float v : px) mean += v;
  mean /= static_cast<double>(px.size());
  double var = 0.0;
  for (float v : px) var += (v - mean) * (v - mean);
  return std::sqrt(var / static_cast<double>(px.size()));
}

void PerturbConfig::validate() const {
  if (!(max_rotation >= 0 && max_translation >= 0 && max_projective >= 0 && noise_sigma >= 0))
    throw std::invalid_argument("perturbation bounds must be nonnegative");
  if (!(gain_min <= gain_max && bias_min <= bias_max)) throw std::invalid_argument("photometric range is inverted");
}

PerturbedPair perturb_pair(const Image& img, const PerturbConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double theta = rng.uniform(-cfg.max_rotation, cfg.max_rotation);
  const double tx = rng.uniform(-cfg.max_translation, cfg.max_translation);
  const double ty = rng.uniform(-cfg.max_translation, cfg.max_translation);
  const double p31 = rng.uniform(-cfg.max_projective, cfg.max_projective);
  const double p32 = rng.uniform(-cfg.max_projective, cfg.max_projective);
  const double gain = rng.uniform(cfg.gain_min, cfg.gain_max);
  const double bias = rng.uniform(cfg.bias_min, cfg.bias_max);

  // H = T(c + t) * P * R * T(-c), all about the image centre.
  const double cx = (img.width() - 1) / 2.0, cy = (img.height() - 1) / 2.0;
  const double c = std::cos(theta), s = std::sin(theta);
  const Homography to_centre = Homography::translation(-cx, -cy);
  const Homography rot{{c, -s, 0, s, c, 0, 0, 0, 1}};
  const Homography proj{{1, 0, 0, 0, 1, 0, p31, p32, 1}};
  const Homography back = Homography::translation(cx + tx, cy + ty);
  Homography h = compose(back, compose(proj, compose(rot, to_centre)));
  for (double& v : h.m) v /= h.m[8];
  // Exact identity / translation when the corresponding bounds are zero.
  if (cfg.max_rotation == 0.0 && cfg.max_projective == 0.0) h = Homography::translation(tx, ty);

  WarpResult w = warp_perspective(img, h, img.width(), img.height());
  const auto px = w.image.pixels();
  std::vector<float> data(px.begin(), px.end());
  const bool photometric = gain != 1.0 || bias != 0.0 || cfg.noise_sigma > 0.0;
  if (photometric) {
    for (std::size_t i = 0; i < data.size(); ++i) {
      if (!w.mask[i]) continue;
      double v = gain * data[i] + bias;
      if (cfg.noise_sigma > 0.0) v += rng.normal(0.0, cfg.noise_sigma);
      data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
  }
  return {Image(img.width(), img.height(), std::move(data)), h, std::move(w.mask)};
}

BenchPair make_bench_pair(std::string name, Image high, int ratio, const std::optional<PerturbConfig>& perturb) {
  if (ratio < 1 || high.width() % ratio != 0 || high.height() % ratio != 0)
    throw std::invalid_argument("scene size must be a multiple of ratio");
  BenchPair p;
  p.name = std::move(name);
  if (perturb) {
    PerturbConfig pc = *perturb;
    pc.max_translation *= high.width() / 512.0;
    PerturbedPair pp = perturb_pair(high, pc);
    p.low = box_downsample(pp.warped, ratio);
    p.truth = invert(pp.truth);
  } else {
    p.low = box_downsample(high, ratio);
    p.truth = Homography::identity();
  }
  p.high = std::move(high);
  return p;
}

std::vector<BenchPair> make_synthetic_suite(const SuiteConfig& cfg) {
  if (cfg.pairs < 1) throw std::invalid_argument("suite needs at least one pair");
  if (cfg.ratio < 1 || cfg.size % cfg.ratio != 0) throw std::invalid_argument("suite size must be a multiple of ratio");
  if (!(cfg.elevation_min > 0 && cfg.elevation_min <= cfg.elevation_max && cfg.elevation_max <= 90))
    throw std::invalid_argument("bad elevation band");
  Rng rng(cfg.seed);
  std::vector<BenchPair> pairs;
  const SceneConfig base = cfg.scene.scaled_to(cfg.size);
  for (int i = 0; i < cfg.pairs; ++i) {
    SceneConfig scene = base;
    scene.seed = rng.next();
    scene.sun_elevation = rng.uniform(cfg.elevation_min, cfg.elevation_max);
    scene.sun_azimuth = rng.uniform(0.0, 360.0);
    const std::uint64_t perturb_seed = rng.next();

    std::optional<PerturbConfig> pc;
    if (cfg.perturb) {
      pc = cfg.perturbation;
      pc->seed = perturb_seed;
    }
    BenchPair p = make_bench_pair("pair_" + std::to_string(i), generate_crater_scene(scene), cfg.ratio, pc);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

BenchResult run_benchmark(std::span<const BenchPair> pairs, std::span<const Method> methods,
                          std::span<const InterpMethod> interps, const PipelineConfig& cfg) {
  if (pairs.empty()) throw std::invalid_argument("benchmark needs at least one pair");
  std::vector<Method> ms(methods.begin(), methods.end());
  std::vector<InterpMethod> is(interps.begin(), interps.end());
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  std::sort(is.begin(), is.end());
  is.erase(std::unique(is.begin(), is.end()), is.end());

  BenchResult result;
  for (const auto& p : pairs) result.pair_names.push_back(p.name);
  for (Method m : ms)
    for (InterpMethod in : is) {
      BenchRow row;
      row.method = m;
      row.interp = in;
      row.runs = pairs.size();
      result.rows.push_back(row);
      result.reports.emplace_back();
    }

  for (const BenchPair& pair : pairs) {
    DetectedFeatures high_cache;
    std::size_t row = 0;
    for (Method m : ms)
      for (InterpMethod in : is) {
        RegistrationResult r = upscale_register_evaluate(pair.low, pair.high, m, in, cfg, &high_cache);
        result.reports[row].push_back(std::move(r.report));
        ++row;
      }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < result.rows.size(); ++r) {
    BenchRow& row = result.rows[r];
    double ssim_sum = 0, psnr_sum = 0, reproj_sum = 0;
    std::size_t reproj_n = 0;
    std::vector<std::size_t> fail_counts(4, 0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      const RegistrationReport& rep = result.reports[r][k];
      if (rep.status != Status::Ok) {
        ++fail_counts[static_cast<std::size_t>(rep.status)];
        continue;
      }
      ++row.ok_runs;
      ssim_sum += *rep.ssim;
      psnr_sum += *rep.psnr_db;
      if (pairs[k].truth) {
        const int w = static_cast<int>(std::lround(pairs[k].low.width() * static_cast<double>(pairs[k].high.width()) /
                                                   pairs[k].low.width()));
        const int h = static_cast<int>(std::lround(pairs[k].low.height() * static_cast<double>(pairs[k].high.width()) /
                                                   pairs[k].low.width()));
        try {
          reproj_sum += mean_corner_error(*rep.homography, *pairs[k].truth, w, h);
          ++reproj_n;
        } catch (const std::exception&) {
          reproj_sum += std::numeric_limits<double>::infinity();
          ++reproj_n;
        }
      }
    }
    row.ssim = row.ok_runs ? ssim_sum / static_cast<double>(row.ok_runs) : nan;
    row.psnr_db = row.ok_runs ? psnr_sum / static_cast<double>(row.ok_runs) : nan;
    row.reproj_px = reproj_n ? reproj_sum / static_cast<double>(reproj_n) : nan;
    if (row.ok_runs == row.runs) {
      row.status = "OK";
    } else if (row.ok_runs > 0) {
      row.status = "PARTIAL";
    } else {
      const auto worst = std::max_element(fail_counts.begin(), fail_counts.end()) - fail_counts.begin();
      row.status = std::string(to_string(static_cast<Status>(worst)));
    }
  }
  return result;
}

namespace {

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(6);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string bench_csv(std::span<const BenchRow> rows) {
  std::ostringstream os;
  os << kBenchCsvHeader << '\n';
  for (const BenchRow& r : rows)
    os << to_string(r.method) << ',' << to_string(r.interp) << ',' << csv_number(r.ssim) << ','
       << csv_number(r.psnr_db) << ',' << csv_number(r.reproj_px) << ',' << r.status << '\n';
  return os.str();
}

}  // namespace syncvision
