#include "syncvision/descmatch.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "syncvision/error.hpp"
#include "syncvision/linalg.hpp"

namespace syncvision {

namespace {

constexpr std::size_t D = kSiftDescriptorSize;

void fix_sign(std::span<double> row) {
  std::size_t arg = 0;
  for (std::size_t i = 1; i < row.size(); ++i)
    if (std::abs(row[i]) > std::abs(row[arg])) arg = i;
  if (row[arg] < 0)
    for (double& v : row) v = -v;
}

// Fits rank rows of the basis; `rank` <= out_dim.
PcaBasis fit_rows(std::span<const SiftDescriptor> descriptors, int out_dim, int rank) {
  std::vector<const SiftDescriptor*> sorted;
  sorted.reserve(descriptors.size());
  for (const auto& d : descriptors) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const SiftDescriptor* a, const SiftDescriptor* b) {
    return std::lexicographical_compare(a->values.begin(), a->values.end(), b->values.begin(), b->values.end());
  });

  PcaBasis basis;
  basis.out_dim = out_dim;
  basis.components.assign(static_cast<std::size_t>(out_dim) * D, 0.0);
  basis.eigenvalues.assign(static_cast<std::size_t>(out_dim), 0.0);

  const std::size_t n = sorted.size();
  if (n > 0) {
    for (const auto* d : sorted)
      for (std::size_t i = 0; i < D; ++i) basis.mean[i] += d->values[i];
    for (double& m : basis.mean) m /= static_cast<double>(n);
  }

  if (rank > 0) {
    std::vector<double> cov(D * D, 0.0);
    std::array<double, D> c;
    for (const auto* d : sorted) {
      for (std::size_t i = 0; i < D; ++i) c[i] = d->values[i] - basis.mean[i];
      for (std::size_t i = 0; i < D; ++i) {
        if (c[i] == 0.0) continue;
        for (std::size_t j = i; j < D; ++j) cov[i * D + j] += c[i] * c[j];
      }
    }
    for (std::size_t i = 0; i < D; ++i)
      for (std::size_t j = i; j < D; ++j) {
        cov[i * D + j] /= static_cast<double>(n);
        cov[j * D + i] = cov[i * D + j];
      }
    const linalg::SymmetricEigen eig = linalg::jacobi_eigen(std::move(cov), D, 1e-10, 100);
    for (int k = 0; k < rank; ++k) {
      std::span<double> row(basis.components.data() + static_cast<std::size_t>(k) * D, D);
      std::copy_n(eig.vectors.begin() + static_cast<std::ptrdiff_t>(k * D), D, row.begin());
      fix_sign(row);
      basis.eigenvalues[k] = eig.values[k];
    }
  }

  // Pad with standard basis vectors orthonormalized against existing rows.
  int filled = rank;
  for (std::size_t e = 0; e < D && filled < out_dim; ++e) {
    std::array<double, D> v{};
    v[e] = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < filled; ++k) {
        const double* r = basis.components.data() + static_cast<std::size_t>(k) * D;
        double dot = 0.0;
        for (std::size_t i = 0; i < D; ++i) dot += v[i] * r[i];
        for (std::size_t i = 0; i < D; ++i) v[i] -= dot * r[i];
      }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm < 1e-6) continue;
    double* dst = basis.components.data() + static_cast<std::size_t>(filled) * D;
    for (std::size_t i = 0; i < D; ++i) dst[i] = v[i] / norm;
    fix_sign(std::span<double>(dst, D));
    basis.padded = true;
    ++filled;
  }
  return basis;
}

}  // namespace

PcaBasis fit_pca(std::span<const SiftDescriptor> descriptors, int out_dim) {
  if (out_dim < 1 || out_dim > static_cast<int>(D)) throw std::invalid_argument("pca: out_dim must be in [1, 128]");
  if (descriptors.size() < static_cast<std::size_t>(out_dim) + 1)
    throw InsufficientSamples("pca: need at least " + std::to_string(out_dim + 1) + " descriptors, got " +
                              std::to_string(descriptors.size()));
  return fit_rows(descriptors, out_dim, out_dim);
}

PcaBasis fit_pca_padded(std::span<const SiftDescriptor> descriptors, int out_dim) {
  if (out_dim < 1 || out_dim > static_cast<int>(D)) throw std::invalid_argument("pca: out_dim must be in [1, 128]");
  const int n = static_cast<int>(std::min<std::size_t>(descriptors.size(), D + 1));
  const int rank = std::clamp(n - 1, 0, out_dim);
  return fit_rows(descriptors, out_dim, rank);
}

std::vector<float> project_pca(const PcaBasis& basis, const SiftDescriptor& d) {
  std::array<double, D> c;
  for (std::size_t i = 0; i < D; ++i) c[i] = d.values[i] - basis.mean[i];
  std::vector<float> y(static_cast<std::size_t>(basis.out_dim));
  for (int k = 0; k < basis.out_dim; ++k) {
    const auto r = basis.row(k);
    double acc = 0.0;
    for (std::size_t i = 0; i < D; ++i) acc += r[i] * c[i];
    y[k] = static_cast<float>(acc);
  }
  return y;
}

DescriptorPool DescriptorPool::from_float(int dim) {
  if (dim < 1) throw std::invalid_argument("float pool dimension must be >= 1");
  DescriptorPool p;
  p.modality = Modality::Float;
  p.dim = dim;
  return p;
}

DescriptorPool DescriptorPool::from_binary() {
  DescriptorPool p;
  p.modality = Modality::Binary256;
  p.dim = 256;
  return p;
}

void DescriptorPool::add(std::span<const float> v, std::size_t keypoint_ref) {
  if (modality != Modality::Float || v.size() != static_cast<std::size_t>(dim))
    throw std::invalid_argument("descriptor does not fit pool modality");
  floats.insert(floats.end(), v.begin(), v.end());
  keypoint_refs.push_back(keypoint_ref);
}

void DescriptorPool::add(const OrbDescriptor& d, std::size_t keypoint_ref) {
  if (modality != Modality::Binary256) throw std::invalid_argument("descriptor does not fit pool modality");
  binaries.push_back(d);
  keypoint_refs.push_back(keypoint_ref);
}

DescriptorPool make_pool(const SiftFeatures& f) {
  DescriptorPool p = DescriptorPool::from_float(kSiftDescriptorSize);
  for (std::size_t i = 0; i < f.descriptors.size(); ++i) p.add(f.descriptors[i].values, i);
  return p;
}

DescriptorPool make_pool(const OrbFeatures& f) {
  DescriptorPool p = DescriptorPool::from_binary();
  for (std::size_t i = 0; i < f.descriptors.size(); ++i) p.add(f.descriptors[i], i);
  return p;
}

namespace {

void check_compatible(const DescriptorPool& a, const DescriptorPool& b) {
  if (a.modality != b.modality) throw std::invalid_argument("descriptor pools differ in modality");
  if (a.modality == Modality::Float && a.dim != b.dim)
    throw std::invalid_argument("float descriptor pools differ in dimension");
}

// Squared L2 for float pools (monotone in L2), Hamming for binary.
inline double raw_distance(const DescriptorPool& a, std::size_t i, const DescriptorPool& b, std::size_t j) {
  if (a.modality == Modality::Binary256) return hamming_distance(a.binaries[i], b.binaries[j]);
  const float* x = a.floats.data() + i * static_cast<std::size_t>(a.dim);
  const float* y = b.floats.data() + j * static_cast<std::size_t>(b.dim);
  double acc = 0.0;
  for (int k = 0; k < a.dim; ++k) {
    const double d = static_cast<double>(x[k]) - y[k];
    acc += d * d;
  }
  return acc;
}

inline double finish(const DescriptorPool& a, double raw) {
  return a.modality == Modality::Float ? std::sqrt(raw) : raw;
}

// Best train index per query; ties to the lowest index.
std::vector<std::size_t> nearest(const DescriptorPool& q, const DescriptorPool& t, std::vector<double>& best_raw) {
  std::vector<std::size_t> idx(q.size(), 0);
  best_raw.assign(q.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < t.size(); ++j) {
      const double d = raw_distance(q, i, t, j);
      if (d < best_raw[i]) {
        best_raw[i] = d;
        idx[i] = j;
      }
    }
  return idx;
}

}  // namespace

double descriptor_distance(const DescriptorPool& a, std::size_t i, const DescriptorPool& b, std::size_t j) {
  check_compatible(a, b);
  return finish(a, raw_distance(a, i, b, j));
}

std::vector<MatchPair> match_bruteforce(const DescriptorPool& query, const DescriptorPool& train, bool cross_check) {
  check_compatible(query, train);
  std::vector<MatchPair> out;
  if (query.size() == 0 || train.size() == 0) return out;
  std::vector<double> fwd_raw;
  const std::vector<std::size_t> fwd = nearest(query, train, fwd_raw);
  std::vector<std::size_t> back;
  if (cross_check) {
    std::vector<double> back_raw;
    back = nearest(train, query, back_raw);
  }
  for (std::size_t i = 0; i < query.size(); ++i) {
    if (cross_check && back[fwd[i]] != i) continue;
    out.push_back({i, fwd[i], finish(query, fwd_raw[i])});
  }
  return out;
}

std::vector<std::vector<MatchPair>> knn_match2(const DescriptorPool& query, const DescriptorPool& train) {
  check_compatible(query, train);
  std::vector<std::vector<MatchPair>> out(query.size());
  if (train.size() == 0) return out;
  for (std::size_t i = 0; i < query.size(); ++i) {
    double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
    std::size_t j1 = 0, j2 = 0;
    for (std::size_t j = 0; j < train.size(); ++j) {
      const double d = raw_distance(query, i, train, j);
      if (d < d1) {
        d2 = d1;
        j2 = j1;
        d1 = d;
        j1 = j;
      } else if (d < d2) {
        d2 = d;
        j2 = j;
      }
    }
    out[i].push_back({i, j1, finish(query, d1)});
    if (train.size() >= 2) out[i].push_back({i, j2, finish(query, d2)});
  }
  return out;
}

std::vector<MatchPair> ratio_test_filter(const std::vector<std::vector<MatchPair>>& knn, double ratio) {
  std::vector<MatchPair> out;
  for (const auto& nn : knn) {
    if (nn.empty()) continue;
    if (nn.size() == 1 || nn[0].distance < ratio * nn[1].distance) out.push_back(nn[0]);
  }
  return out;
}

IntFeatPools build_intfeat_pools(const SiftFeatures& sift, const OrbFeatures& orb, const PcaBasis& basis) {
  if (sift.keypoints.size() != sift.descriptors.size() || orb.keypoints.size() != orb.descriptors.size())
    throw std::invalid_argument("keypoint and descriptor lists must be parallel");
  IntFeatPools pools{DescriptorPool::from_float(basis.out_dim), make_pool(orb)};
  for (std::size_t i = 0; i < sift.descriptors.size(); ++i) pools.sift.add(project_pca(basis, sift.descriptors[i]), i);
  return pools;
}

}  // namespace syncvision
