#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "infoforge/corpus.hpp"
#include "test_support.hpp"

using namespace infoforge;

namespace {

const AssetStore& pack() {
  static const AssetStore store = AssetStore::load(INFOFORGE_SAMPLE_PACK);
  return store;
}

Eigen::MatrixXd raster_matrix(const std::vector<VifLayout>& layouts) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(layouts.size()), kRasterSize * kRasterSize);
  for (std::size_t i = 0; i < layouts.size(); ++i) {
    m.row(static_cast<Eigen::Index>(i)) = raster_vector(rasterize_vif(layouts[i])).transpose();
  }
  return m;
}

// Each coordinate moves by at most `amplitude`.
VifLayout jittered(const VifLayout& l, std::mt19937_64& rng, double amplitude) {
  std::uniform_real_distribution<double> noise(-amplitude, amplitude);
  VifLayout out = l;
  out.id = l.id + "~";
  for (auto& p : out.points) p = (p + Point(noise(rng), noise(rng))).cwiseMax(0.0).cwiseMin(1.0);
  return out;
}

// Neighbour ranks by brute force, nearest first, excluding i.
std::vector<int> neighbour_order(const Eigen::MatrixXd& x, int i) {
  std::vector<int> idx;
  for (int j = 0; j < x.rows(); ++j) {
    if (j != i) idx.push_back(j);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return (x.row(a) - x.row(i)).squaredNorm() < (x.row(b) - x.row(i)).squaredNorm();
  });
  return idx;
}

// Venna & Kaski trustworthiness of an embedding at neighbourhood size k.
double trustworthiness(const Eigen::MatrixXd& high, const Eigen::MatrixXd& low, int k) {
  const int n = static_cast<int>(high.rows());
  double penalty = 0;
  for (int i = 0; i < n; ++i) {
    const auto h = neighbour_order(high, i);
    const auto l = neighbour_order(low, i);
    std::map<int, int> rank;
    for (int r = 0; r < n - 1; ++r) rank[h[r]] = r + 1;
    for (int r = 0; r < k; ++r) {
      if (rank[l[r]] > k) penalty += rank[l[r]] - k;
    }
  }
  return 1.0 - 2.0 / (n * k * (2.0 * n - 3.0 * k - 1.0)) * penalty;
}

}  // namespace

TEST_CASE("rasterize a horizontal two-point layout") {
  VifLayout l{"h", {{0.0, 0.5}, {1.0, 0.5}}, {}, ""};
  const auto r = rasterize_vif(l);
  // y = 0.5 maps to pixel row 31.5; a 2 px stroke covers rows 31 and 32.
  for (int x = 0; x < kRasterSize; ++x) {
    CHECK(r(31, x) == 1);
    CHECK(r(32, x) == 1);
  }
  CHECK(r.cast<int>().sum() <= 4 * kRasterSize);
  CHECK(r.row(10).cast<int>().sum() == 0);
  CHECK((rasterize_vif(l) == r).all());
}

TEST_CASE("jitter of 0.01 changes fewer than 5% of raster pixels") {
  std::mt19937_64 rng(42);
  for (const auto& l : pack().layouts()) {
    const auto a = rasterize_vif(l);
    const auto b = rasterize_vif(jittered(l, rng, 0.01));
    const int differing = (a != b).cast<int>().sum();
    CHECK_MESSAGE(differing < 0.05 * kRasterSize * kRasterSize, l.id);
  }
}

TEST_CASE("PCA needs more samples than components") {
  try {
    fit_pca(Eigen::MatrixXd::Random(50, 100));
    FAIL("expected TooFewSamples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTooFewSamples);
  }
}

TEST_CASE("PCA of identical rasters projects everything to zero") {
  const std::vector<VifLayout> same(60, VifLayout{"s", {{0.2, 0.2}, {0.8, 0.7}}, {}, ""});
  const auto x = raster_matrix(same);
  const auto model = fit_pca(x);
  for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(model.project(x.row(i).transpose()).norm() == 0.0);
}

TEST_CASE("PCA basis on the sample pack") {
  const auto x = raster_matrix(pack().layouts());
  const auto model = fit_pca(x);
  REQUIRE(model.basis.cols() == kPcaComponents);

  const Eigen::MatrixXd gram = model.basis.transpose() * model.basis;
  CHECK((gram - Eigen::MatrixXd::Identity(kPcaComponents, kPcaComponents)).cwiseAbs().maxCoeff() <
        1e-6);

  for (int c = 1; c < kPcaComponents; ++c) {
    CHECK(model.explained_variance(c) <= model.explained_variance(c - 1) + 1e-12);
  }

  // Reconstruction error per prefix, computed by explicit projection.
  double previous = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= kPcaComponents; ++m) {
    const Eigen::MatrixXd b = model.basis.leftCols(m);
    double mse = 0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      const Eigen::VectorXd centered = x.row(i).transpose() - model.mean;
      mse += (centered - b * (b.transpose() * centered)).squaredNorm();
    }
    mse /= static_cast<double>(x.size());
    CHECK(mse <= previous + 1e-12);
    previous = mse;
  }
}

TEST_CASE("t-SNE is deterministic and keeps identical inputs together") {
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(30, 8);
  v.row(7) = v.row(3);
  const auto a = embed_2d(v);
  const auto b = embed_2d(v);
  CHECK(a == b);
  CHECK((a.row(7) - a.row(3)).norm() < 1e-3);
}

TEST_CASE("t-SNE trustworthiness on the sample pack") {
  const auto x = raster_matrix(pack().layouts());
  const auto model = fit_pca(x);
  const Eigen::MatrixXd v = (x.rowwise() - model.mean.transpose()) * model.basis;
  const Eigen::MatrixXd y = embed_2d(v);
  const double t = trustworthiness(v, y, 5);
  MESSAGE("trustworthiness(k=5) = " << t);
  CHECK(t >= 0.80);
}

TEST_CASE("twelve planar blobs cluster with purity 1") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.3);
  Eigen::MatrixX2d pts(120, 2);
  for (int c = 0; c < 12; ++c) {
    for (int m = 0; m < 10; ++m) {
      pts.row(c * 10 + m) << 10.0 * (c % 4) + noise(rng), 10.0 * (c / 4) + noise(rng);
    }
  }
  const auto result = cluster_vifs(pts);
  CHECK_FALSE(result.fallback);
  std::set<int> distinct;
  for (int c = 0; c < 12; ++c) {
    for (int m = 0; m < 10; ++m) CHECK(result.labels[c * 10 + m] == result.labels[c * 10]);
    distinct.insert(result.labels[c * 10]);
  }
  CHECK(distinct.size() == 12);
  CHECK(cluster_vifs(pts).labels == result.labels);
}

TEST_CASE("identical points take the k-means++ fallback and still fill k clusters") {
  const Eigen::MatrixX2d pts = Eigen::MatrixX2d::Constant(20, 2, 0.5);
  const auto result = cluster_vifs(pts, {.k = 12, .seed = 4});
  CHECK(result.fallback);
  REQUIRE_FALSE(result.diagnostics.empty());
  CHECK(result.diagnostics[0].find("InsufficientDensity") != std::string::npos);
  CHECK(std::set<int>(result.labels.begin(), result.labels.end()).size() == 12);
  CHECK(cluster_vifs(pts, {.k = 12, .seed = 4}).labels == result.labels);
  CHECK_THROWS_AS(cluster_vifs(Eigen::MatrixX2d::Zero(5, 2)), Error);
}

TEST_CASE("layout blobs through the full pipeline") {
  const auto layouts = test::synthetic_blobs(3);
  const auto model = build_cluster_model(layouts, {.k = 12, .seed = 1});
  CHECK_FALSE(model.fallback);
  std::map<int, std::set<int>> clusters_per_blob;
  std::set<int> used;
  for (const auto& l : layouts) {
    clusters_per_blob[test::blob_of(l.id)].insert(model.assignments.at(l.id));
    used.insert(model.assignments.at(l.id));
  }
  for (const auto& [blob, clusters] : clusters_per_blob) CHECK(clusters.size() == 1);
  CHECK(used.size() == 12);
}

TEST_CASE("assign_cluster on the sample pack") {
  static const auto bundle = build_indices(pack());
  const auto& model = bundle.clusters;
  REQUIRE(model.assignments.size() == pack().layouts().size());

  int agree = 0;
  std::mt19937_64 rng(17);
  for (const auto& l : pack().layouts()) {
    CHECK(assign_cluster(model, l) == model.assignments.at(l.id));
    VifLayout dup = l;
    dup.id = "copy-of-" + l.id;
    CHECK(assign_cluster(model, dup) == model.assignments.at(l.id));
    agree += assign_cluster(model, jittered(l, rng, 0.005)) == model.assignments.at(l.id);
  }
  const double rate = static_cast<double>(agree) / static_cast<double>(pack().layouts().size());
  MESSAGE("jitter agreement " << rate);
  CHECK(rate >= 0.95);
}

TEST_CASE("index files are byte-identical across builds and reload") {
  test::TempDir a;
  test::TempDir b;
  write_indices(build_indices(pack(), {.seed = 7}), a.path());
  write_indices(build_indices(pack(), {.seed = 7}), b.path());
  for (const char* name : {kClusterModelFile, kVgIndexFile, kCIndexFile}) {
    CHECK(test::read(a.path() / name) == test::read(b.path() / name));
  }
  const auto reloaded = load_indices(a.path());
  const auto rebuilt = build_indices(pack(), {.seed = 7});
  CHECK(reloaded.clusters.assignments == rebuilt.clusters.assignments);
  CHECK(to_json(reloaded.clusters) == to_json(rebuilt.clusters));
  CHECK(reloaded.vg_index.documents() == rebuilt.vg_index.documents());
  VifLayout novel{"novel", {{0.1, 0.1}, {0.5, 0.6}, {0.9, 0.2}, {0.7, 0.9}}, {}, ""};
  CHECK(assign_cluster(reloaded.clusters, novel) == assign_cluster(rebuilt.clusters, novel));
}

TEST_CASE("missing index files are reported") {
  test::TempDir dir;
  try {
    load_indices(dir.path());
    FAIL("expected NotFound");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNotFound);
  }
}
