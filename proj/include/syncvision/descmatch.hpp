#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "syncvision/features.hpp"

namespace syncvision {

inline constexpr int kPcaDim = 32;

/// Mean + orthonormal principal directions for SIFT descriptor reduction.
struct PcaBasis {
  std::array<double, kSiftDescriptorSize> mean{};
  /// out_dim rows of 128, row-major, orthonormal.
  std::vector<double> components;
  std::vector<double> eigenvalues;  // descending
  int out_dim = 0;
  /// Rows beyond the fitted rank were filled with orthonormalized standard
  /// basis vectors.
  bool padded = false;

  std::span<const double> row(int k) const {
    return std::span<const double>(components).subspan(static_cast<std::size_t>(k) * kSiftDescriptorSize,
                                                        kSiftDescriptorSize);
  }
};

/// Mean-centred covariance, cyclic Jacobi (tol 1e-10, <= 100 sweeps), top
/// `out_dim` eigenvectors, each sign-fixed so its largest-magnitude entry is
/// positive. The input is sorted by descriptor bytes first, so any
/// permutation of the same set gives a bit-identical basis.
/// Throws InsufficientSamples when fewer than out_dim + 1 descriptors.
PcaBasis fit_pca(std::span<const SiftDescriptor> descriptors, int out_dim = kPcaDim);

/// As fit_pca, but never throws for small sets: the fitted rank is
/// min(out_dim, n - 1) and the remaining rows are padded (basis.padded).
PcaBasis fit_pca_padded(std::span<const SiftDescriptor> descriptors, int out_dim = kPcaDim);

/// y = components * (d - mean).
std::vector<float> project_pca(const PcaBasis& basis, const SiftDescriptor& d);

enum class Modality { Float, Binary256 };

/// Homogeneous descriptor set for brute-force matching. Float pools carry
/// `dim` floats per entry in `floats`; binary pools carry `binaries`.
struct DescriptorPool {
  Modality modality = Modality::Float;
  int dim = 0;
  std::vector<float> floats;
  std::vector<OrbDescriptor> binaries;
  std::vector<std::size_t> keypoint_refs;

  std::size_t size() const { return keypoint_refs.size(); }
  std::span<const float> vector(std::size_t i) const {
    return std::span<const float>(floats).subspan(i * static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  }

  static DescriptorPool from_float(int dim);
  static DescriptorPool from_binary();
  void add(std::span<const float> v, std::size_t keypoint_ref);
  void add(const OrbDescriptor& d, std::size_t keypoint_ref);
};

DescriptorPool make_pool(const SiftFeatures& f);
DescriptorPool make_pool(const OrbFeatures& f);

struct MatchPair {
  std::size_t query_index = 0;
  std::size_t train_index = 0;
  double distance = 0.0;  // L2 (float) or Hamming count (binary)

  bool operator==(const MatchPair&) const = default;
};

/// Modality distance between entry i of `a` and entry j of `b`.
double descriptor_distance(const DescriptorPool& a, std::size_t i, const DescriptorPool& b, std::size_t j);

/// Nearest neighbour in `train` for every query, ties to the lowest train
/// index. With cross_check only mutual nearest pairs remain.
/// Throws std::invalid_argument on modality (or float dimension) mismatch.
std::vector<MatchPair> match_bruteforce(const DescriptorPool& query, const DescriptorPool& train, bool cross_check);

/// Up to two nearest neighbours per query, ascending distance.
std::vector<std::vector<MatchPair>> knn_match2(const DescriptorPool& query, const DescriptorPool& train);

/// Keeps the best neighbour when d1 < ratio * d2, or unconditionally when
/// only one neighbour exists.
std::vector<MatchPair> ratio_test_filter(const std::vector<std::vector<MatchPair>>& knn, double ratio = 0.75);

/// IntFeat pools for one image: PCA-reduced SIFT (32-d float) and ORB.
struct IntFeatPools {
  DescriptorPool sift;  // keypoint_refs index the SIFT keypoint list
  DescriptorPool orb;   // keypoint_refs index the ORB keypoint list
  std::size_t combined_keypoints() const { return sift.size() + orb.size(); }
};

IntFeatPools build_intfeat_pools(const SiftFeatures& sift, const OrbFeatures& orb, const PcaBasis& basis);

}  // namespace syncvision
