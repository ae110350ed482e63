#pragma once

// Offline index construction: VIF rasters, PCA, t-SNE, density clustering.
//
// Pipeline per corpus: rasterize every layout to 64x64, project onto 50
// principal components, embed the projections in the plane with exact
// t-SNE, then cluster the plane. DBSCAN proposes density peaks, the k
// largest seed Lloyd iterations that run until assignments stop changing.

#include <Eigen/Core>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "infoforge/asset_store.hpp"
#include "json.hpp"

namespace infoforge {

inline constexpr int kRasterSize = 64;
inline constexpr int kPcaComponents = 50;

/// Row index is y, column index is x. Cells are 0 or 1.
using Raster = Eigen::Array<std::uint8_t, kRasterSize, kRasterSize, Eigen::RowMajor>;

/// Polyline through the points with a 2 px stroke and 3 px vertex dots.
Raster rasterize_vif(const PointList& points);
inline Raster rasterize_vif(const VifLayout& layout) { return rasterize_vif(layout.points); }

/// Flattened raster as a 4096-vector of 0/1 values.
Eigen::VectorXd raster_vector(const Raster& raster);

struct PcaModel {
  Eigen::VectorXd mean;
  /// One orthonormal component per column, strongest first.
  Eigen::MatrixXd basis;
  Eigen::VectorXd explained_variance;

  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  Eigen::VectorXd reconstruct(const Eigen::VectorXd& coefficients) const;
};

/// Samples are rows. Needs at least components + 1 of them; throws
/// Error(kTooFewSamples) otherwise. Each component's largest-magnitude entry
/// is made positive so the basis is reproducible.
PcaModel fit_pca(const Eigen::MatrixXd& samples, int components = kPcaComponents);

struct TsneOptions {
  double perplexity = 15.0;
  int iterations = 1000;
  double early_exaggeration = 12.0;
  int exaggeration_iterations = 250;
  /// Zero selects max(N / early_exaggeration / 4, 50).
  double learning_rate = 0.0;
};

/// Exact t-SNE with PCA initialisation; rows in, rows out. Fully
/// deterministic, so no seed is consumed. Perplexity is capped at
/// (N - 1) / 3 for small inputs.
Eigen::MatrixX2d embed_2d(const Eigen::MatrixXd& vectors, const TsneOptions& options = {});

struct ClusterOptions {
  int k = kDefaultClusterCount;
  int min_pts = 4;
  /// Used only by the k-means++ fallback.
  std::uint64_t seed = 0;
  int max_iterations = 300;
};

struct Clustering {
  Eigen::MatrixX2d centers;
  std::vector<int> labels;
  /// DBSCAN neighbourhood radius picked at the k-distance elbow.
  double eps = 0;
  int density_peaks = 0;
  /// True when DBSCAN found fewer than k peaks and k-means++ seeded instead.
  bool fallback = false;
  std::vector<std::string> diagnostics;
};

/// Throws Error(kTooFewSamples) when there are fewer points than clusters.
Clustering cluster_vifs(const Eigen::MatrixX2d& planar, const ClusterOptions& options = {});

struct ClusterModel {
  int k = kDefaultClusterCount;
  std::uint64_t seed = 0;
  PcaModel pca;
  Eigen::MatrixX2d centers;
  /// Corpus layouts in id order with their projections.
  std::vector<std::string> layout_ids;
  Eigen::MatrixXd pca_vectors;
  Eigen::MatrixX2d planar;
  std::map<std::string, int> assignments;
  double eps = 0;
  bool fallback = false;
  std::vector<std::string> diagnostics;
};

struct BuildOptions {
  int k = kDefaultClusterCount;
  std::uint64_t seed = 0;
  TsneOptions tsne;
  int min_pts = 4;
};

/// Full pipeline over a layout set. When the layouts carry hand labels,
/// computed clusters are renamed to the hand label they overlap most.
ClusterModel build_cluster_model(const std::vector<VifLayout>& layouts,
                                 const BuildOptions& options = {});

/// Stored assignment for corpus members, otherwise the cluster of the
/// nearest corpus layout in PCA space.
int assign_cluster(const ClusterModel& model, const VifLayout& layout);

nlohmann::json to_json(const ClusterModel& model);
ClusterModel cluster_model_from_json(const nlohmann::json& j);

}  // namespace infoforge
