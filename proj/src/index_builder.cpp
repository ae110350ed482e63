#include "infoforge/index_builder.hpp"

#include <Eigen/SVD>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

namespace infoforge {
namespace {

using Eigen::Index;
using Eigen::MatrixX2d;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double segment_distance(const Point& p, const Point& a, const Point& b) {
  const Point d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(d) / len2, 0.0, 1.0);
  return (a + t * d - p).norm();
}

// Makes the largest-magnitude entry of every column positive.
void fix_signs(MatrixXd& columns) {
  for (Index c = 0; c < columns.cols(); ++c) {
    Index at = 0;
    columns.col(c).cwiseAbs().maxCoeff(&at);
    if (columns(at, c) < 0) columns.col(c) *= -1;
  }
}

MatrixXd squared_distances(const MatrixXd& x) {
  const VectorXd norms = x.rowwise().squaredNorm();
  MatrixXd d = (-2.0 * x * x.transpose()).colwise() + norms;
  d.rowwise() += norms.transpose();
  d = d.cwiseMax(0.0);
  d.diagonal().setZero();
  return d;
}

// Row-conditional affinities whose entropy matches log(perplexity).
MatrixXd joint_probabilities(const MatrixXd& d2, double perplexity) {
  const Index n = d2.rows();
  const double target = std::log(perplexity);
  MatrixXd p = MatrixXd::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    double beta = 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    double dmin = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < n; ++j) {
      if (j != i) dmin = std::min(dmin, d2(i, j));
    }
    VectorXd row(n);
    for (int iter = 0; iter < 100; ++iter) {
      double z = 0;
      double weighted = 0;
      for (Index j = 0; j < n; ++j) {
        row(j) = j == i ? 0.0 : std::exp(-beta * (d2(i, j) - dmin));
        z += row(j);
        weighted += row(j) * (d2(i, j) - dmin);
      }
      const double entropy = std::log(z) + beta * weighted / z;
      row /= z;
      const double diff = entropy - target;
      if (std::abs(diff) < 1e-5) break;
      if (diff > 0) {
        lo = beta;
        beta = std::isinf(hi) ? beta * 2 : (beta + hi) / 2;
      } else {
        hi = beta;
        beta = (beta + lo) / 2;
      }
    }
    p.row(i) = row.transpose();
  }
  MatrixXd joint = (p + p.transpose()) / (2.0 * static_cast<double>(n));
  return joint.cwiseMax(1e-12);
}

MatrixX2d pca_init(const MatrixXd& x) {
  const Index n = x.rows();
  MatrixX2d y = MatrixX2d::Zero(n, 2);
  if (n < 2 || x.cols() == 0) return y;
  const MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  MatrixXd v = svd.matrixV();
  fix_signs(v);
  const Index dims = std::min<Index>(2, v.cols());
  y.leftCols(dims) = centered * v.leftCols(dims);
  const double mean0 = y.col(0).mean();
  const double sd = std::sqrt((y.col(0).array() - mean0).square().mean());
  if (sd > 0) y *= 1e-4 / sd;
  return y;
}

std::vector<int> dbscan(const MatrixXd& dist, double eps, int min_pts) {
  const Index n = dist.rows();
  std::vector<int> labels(n, -2);  // -2 unvisited, -1 noise
  auto neighbours = [&](Index i) {
    std::vector<Index> out;
    for (Index j = 0; j < n; ++j) {
      if (dist(i, j) <= eps) out.push_back(j);
    }
    return out;
  };
  int next = 0;
  for (Index i = 0; i < n; ++i) {
    if (labels[i] != -2) continue;
    auto seeds = neighbours(i);
    if (static_cast<int>(seeds.size()) < min_pts) {
      labels[i] = -1;
      continue;
    }
    const int id = next++;
    labels[i] = id;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const Index j = seeds[s];
      if (labels[j] == -1) labels[j] = id;
      if (labels[j] != -2) continue;
      labels[j] = id;
      const auto more = neighbours(j);
      if (static_cast<int>(more.size()) >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
    }
  }
  return labels;
}

// Radius at the knee of the sorted k-distance curve: the sample farthest
// below the chord joining the curve's ends.
double k_distance_elbow(const MatrixXd& dist, int min_pts) {
  const Index n = dist.rows();
  const Index kth = std::min<Index>(min_pts - 1, n - 1);
  std::vector<double> kd(n);
  for (Index i = 0; i < n; ++i) {
    std::vector<double> row(n);
    for (Index j = 0; j < n; ++j) row[j] = dist(i, j);
    std::nth_element(row.begin(), row.begin() + kth, row.end());
    kd[i] = row[kth];
  }
  std::sort(kd.begin(), kd.end());
  const double span = kd.back() - kd.front();
  if (span <= 0 || n < 3) return kd.back();
  Index best = 0;
  double best_gap = -1;
  for (Index i = 0; i < n; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(n - 1);
    const double y = (kd[i] - kd.front()) / span;
    if (x - y > best_gap) {
      best_gap = x - y;
      best = i;
    }
  }
  return kd[best];
}

MatrixX2d kmeans_pp(const MatrixX2d& pts, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Index n = pts.rows();
  std::vector<Index> chosen{static_cast<Index>(std::uniform_int_distribution<Index>(0, n - 1)(rng))};
  VectorXd d2 = (pts.rowwise() - pts.row(chosen[0])).rowwise().squaredNorm();
  while (static_cast<int>(chosen.size()) < k) {
    const double total = d2.sum();
    Index pick = 0;
    if (total > 0) {
      double r = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick < n - 1; ++pick) {
        r -= d2(pick);
        if (r < 0) break;
      }
    } else {
      while (std::find(chosen.begin(), chosen.end(), pick) != chosen.end()) ++pick;
    }
    chosen.push_back(pick);
    d2 = d2.cwiseMin((pts.rowwise() - pts.row(pick)).rowwise().squaredNorm());
  }
  MatrixX2d centers(k, 2);
  for (int c = 0; c < k; ++c) centers.row(c) = pts.row(chosen[c]);
  return centers;
}

std::vector<int> nearest_centers(const MatrixX2d& pts, const MatrixX2d& centers) {
  std::vector<int> labels(pts.rows());
  for (Index i = 0; i < pts.rows(); ++i) {
    Index best = 0;
    (centers.rowwise() - pts.row(i)).rowwise().squaredNorm().minCoeff(&best);
    labels[i] = static_cast<int>(best);
  }
  return labels;
}

// Moves the point farthest from its center, taken from the largest
// cluster, into every empty cluster.
void repair_empty(const MatrixX2d& pts, MatrixX2d& centers, std::vector<int>& labels) {
  const int k = static_cast<int>(centers.rows());
  for (int c = 0; c < k; ++c) {
    std::vector<int> sizes(k, 0);
    for (int l : labels) ++sizes[l];
    if (sizes[c] > 0) continue;
    const int donor = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    Index far = -1;
    double far_d = -1;
    for (Index i = 0; i < pts.rows(); ++i) {
      if (labels[i] != donor) continue;
      const double d = (pts.row(i) - centers.row(donor)).squaredNorm();
      if (d > far_d) {
        far_d = d;
        far = i;
      }
    }
    labels[far] = c;
    centers.row(c) = pts.row(far);
  }
}

MatrixX2d means(const MatrixX2d& pts, const std::vector<int>& labels, const MatrixX2d& previous) {
  MatrixX2d sums = MatrixX2d::Zero(previous.rows(), 2);
  VectorXd counts = VectorXd::Zero(previous.rows());
  for (Index i = 0; i < pts.rows(); ++i) {
    sums.row(labels[i]) += pts.row(i);
    counts(labels[i]) += 1;
  }
  MatrixX2d out = previous;
  for (Index c = 0; c < out.rows(); ++c) {
    if (counts(c) > 0) out.row(c) = sums.row(c) / counts(c);
  }
  return out;
}

nlohmann::json matrix_json(const MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const nlohmann::json& rows, Index cols) {
  MatrixXd m(static_cast<Index>(rows.size()), cols);
  for (Index r = 0; r < m.rows(); ++r) {
    const auto& row = rows.at(r);
    if (static_cast<Index>(row.size()) != cols) {
      throw Error(ErrorCode::kCorruptAsset, "cluster model matrix has ragged rows");
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = row.at(c).get<double>();
  }
  return m;
}

VectorXd vector_from_json(const nlohmann::json& a) {
  VectorXd v(static_cast<Index>(a.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = a.at(i).get<double>();
  return v;
}

}  // namespace

Raster rasterize_vif(const PointList& points) {
  Raster raster = Raster::Zero();
  constexpr double scale = kRasterSize - 1;
  PointList px;
  px.reserve(points.size());
  for (const auto& p : points) px.push_back(p * scale);

  auto stamp = [&](const Point& lo, const Point& hi, auto&& inside) {
    const int x0 = std::max(0, static_cast<int>(std::floor(lo.x())));
    const int y0 = std::max(0, static_cast<int>(std::floor(lo.y())));
    const int x1 = std::min(kRasterSize - 1, static_cast<int>(std::ceil(hi.x())));
    const int y1 = std::min(kRasterSize - 1, static_cast<int>(std::ceil(hi.y())));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (inside(Point(x, y))) raster(y, x) = 1;
      }
    }
  };

  constexpr double half_stroke = 1.0;
  constexpr double dot_radius = 1.5;
  for (std::size_t i = 0; i + 1 < px.size(); ++i) {
    const Point& a = px[i];
    const Point& b = px[i + 1];
    const Point pad = Point::Constant(half_stroke);
    stamp(a.cwiseMin(b) - pad, a.cwiseMax(b) + pad,
          [&](const Point& c) { return segment_distance(c, a, b) <= half_stroke; });
  }
  for (const auto& v : px) {
    const Point pad = Point::Constant(dot_radius);
    stamp(v - pad, v + pad, [&](const Point& c) { return (c - v).norm() <= dot_radius; });
  }
  return raster;
}

Eigen::VectorXd raster_vector(const Raster& raster) {
  return Eigen::Map<const Eigen::Matrix<std::uint8_t, kRasterSize * kRasterSize, 1>>(raster.data())
      .cast<double>();
}

Eigen::VectorXd PcaModel::project(const Eigen::VectorXd& x) const {
  return basis.transpose() * (x - mean);
}

Eigen::VectorXd PcaModel::reconstruct(const Eigen::VectorXd& coefficients) const {
  return mean + basis.leftCols(coefficients.size()) * coefficients;
}

PcaModel fit_pca(const Eigen::MatrixXd& samples, int components) {
  const Index n = samples.rows();
  if (n < components + 1) {
    throw Error(ErrorCode::kTooFewSamples,
                fmt::format("PCA with {} components needs at least {} samples, got {}", components,
                            components + 1, n));
  }
  if (samples.cols() < components) {
    throw Error(ErrorCode::kInvalidArgument, "more components than sample dimensions");
  }
  PcaModel model;
  model.mean = samples.colwise().mean().transpose();
  const MatrixXd centered = samples.rowwise() - model.mean.transpose();
  Eigen::BDCSVD<MatrixXd> svd(centered, Eigen::ComputeThinV);
  MatrixXd v = svd.matrixV().leftCols(components);
  fix_signs(v);
  model.basis = std::move(v);
  model.explained_variance =
      svd.singularValues().head(components).array().square() / static_cast<double>(n - 1);
  return model;
}

Eigen::MatrixX2d embed_2d(const Eigen::MatrixXd& vectors, const TsneOptions& options) {
  const Index n = vectors.rows();
  if (n < 2) return MatrixX2d::Zero(n, 2);
  const double perplexity =
      std::max(1.0, std::min(options.perplexity, static_cast<double>(n - 1) / 3.0));
  const MatrixXd p = joint_probabilities(squared_distances(vectors), perplexity);

  const double learning_rate =
      options.learning_rate > 0
          ? options.learning_rate
          : std::max(static_cast<double>(n) / options.early_exaggeration / 4.0, 50.0);

  // Identical inputs have identical gradients in exact arithmetic. Rounding
  // differences between them would be amplified by the exaggerated early
  // steps, so each group of duplicates moves as one point.
  std::vector<std::vector<Index>> duplicates;
  {
    const MatrixXd d2 = squared_distances(vectors);
    const double tol = 1e-12 * std::max(1.0, vectors.rowwise().squaredNorm().maxCoeff());
    std::vector<bool> grouped(n, false);
    for (Index i = 0; i < n; ++i) {
      if (grouped[i]) continue;
      std::vector<Index> group{i};
      for (Index j = i + 1; j < n; ++j) {
        if (!grouped[j] && d2(i, j) <= tol) {
          group.push_back(j);
          grouped[j] = true;
        }
      }
      if (group.size() > 1) duplicates.push_back(std::move(group));
    }
  }
  auto merge_duplicates = [&](MatrixX2d& m) {
    for (const auto& group : duplicates) {
      Eigen::RowVector2d mean = Eigen::RowVector2d::Zero();
      for (Index i : group) mean += m.row(i);
      mean /= static_cast<double>(group.size());
      for (Index i : group) m.row(i) = mean;
    }
  };

  MatrixX2d y = pca_init(vectors);
  merge_duplicates(y);
  MatrixX2d update = MatrixX2d::Zero(n, 2);
  MatrixX2d gains = MatrixX2d::Ones(n, 2);
  MatrixXd num(n, n);
  MatrixX2d grad(n, 2);
  for (int iter = 0; iter < options.iterations; ++iter) {
    const bool early = iter < options.exaggeration_iterations;
    const double exaggeration = early ? options.early_exaggeration : 1.0;
    const double momentum = early ? 0.5 : 0.8;

    num = (1.0 + squared_distances(y).array()).inverse().matrix();
    num.diagonal().setZero();
    const double z = std::max(num.sum(), std::numeric_limits<double>::min());
    // W = (exaggerated P - Q) .* num; gradient_i = 4 sum_j W_ij (y_i - y_j).
    const MatrixXd w = ((exaggeration * p).array() - num.array() / z).matrix().cwiseProduct(num);
    grad = 4.0 * (w.rowwise().sum().asDiagonal() * y - w * y);

    for (Index i = 0; i < n; ++i) {
      for (Index c = 0; c < 2; ++c) {
        const bool flipped = grad(i, c) * update(i, c) < 0;
        gains(i, c) = std::max(0.01, flipped ? gains(i, c) + 0.2 : gains(i, c) * 0.8);
      }
    }
    update = momentum * update - learning_rate * gains.cwiseProduct(grad);
    merge_duplicates(update);
    y += update;
    merge_duplicates(y);
  }
  return y;
}

Clustering cluster_vifs(const Eigen::MatrixX2d& planar, const ClusterOptions& options) {
  const Index n = planar.rows();
  const int k = options.k;
  if (k < 1 || n < k) {
    throw Error(ErrorCode::kTooFewSamples,
                fmt::format("clustering into {} groups needs at least {} points, got {}", k, k, n));
  }
  MatrixXd dist(n, n);
  for (Index i = 0; i < n; ++i) {
    dist.row(i) = (planar.rowwise() - planar.row(i)).rowwise().norm().transpose();
  }

  Clustering out;
  out.eps = k_distance_elbow(dist, options.min_pts);
  const auto db = dbscan(dist, out.eps, options.min_pts);
  const int peaks = db.empty() ? 0 : std::max(0, *std::max_element(db.begin(), db.end()) + 1);
  out.density_peaks = peaks;

  if (peaks >= k) {
    std::vector<int> sizes(peaks, 0);
    for (int l : db) {
      if (l >= 0) ++sizes[l];
    }
    std::vector<int> order(peaks);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return sizes[a] > sizes[b]; });
    out.centers.resize(k, 2);
    for (int c = 0; c < k; ++c) {
      Eigen::RowVector2d sum = Eigen::RowVector2d::Zero();
      for (Index i = 0; i < n; ++i) {
        if (db[i] == order[c]) sum += planar.row(i);
      }
      out.centers.row(c) = sum / sizes[order[c]];
    }
  } else {
    out.fallback = true;
    out.diagnostics.push_back(fmt::format(
        "InsufficientDensity: DBSCAN found {} density peaks for k={} (eps={:.6g}); seeded with k-means++",
        peaks, k, out.eps));
    out.centers = kmeans_pp(planar, k, options.seed);
  }

  std::vector<int> labels;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    auto next = nearest_centers(planar, out.centers);
    repair_empty(planar, out.centers, next);
    out.centers = means(planar, next, out.centers);
    if (next == labels) break;
    labels = std::move(next);
  }
  out.labels = std::move(labels);
  return out;
}

ClusterModel build_cluster_model(const std::vector<VifLayout>& layouts, const BuildOptions& options) {
  std::vector<const VifLayout*> sorted;
  for (const auto& l : layouts) sorted.push_back(&l);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });

  const Index n = static_cast<Index>(sorted.size());
  MatrixXd rasters(n, kRasterSize * kRasterSize);
  for (Index i = 0; i < n; ++i) rasters.row(i) = raster_vector(rasterize_vif(*sorted[i])).transpose();

  ClusterModel model;
  model.k = options.k;
  model.seed = options.seed;
  model.pca = fit_pca(rasters);
  model.pca_vectors = (rasters.rowwise() - model.pca.mean.transpose()) * model.pca.basis;
  model.planar = embed_2d(model.pca_vectors, options.tsne);

  auto clustering = cluster_vifs(model.planar, {options.k, options.min_pts, options.seed});
  model.eps = clustering.eps;
  model.fallback = clustering.fallback;
  model.diagnostics = clustering.diagnostics;

  // Canonical names: hand labels by greedy majority overlap when every
  // layout has one, else order of first appearance in id order.
  const int k = options.k;
  const bool labelled = std::all_of(sorted.begin(), sorted.end(), [&](auto* l) {
    return l->cluster_id && *l->cluster_id >= 0 && *l->cluster_id < k;
  });
  std::vector<int> rename(k, -1);
  std::vector<bool> taken(k, false);
  if (labelled) {
    Eigen::MatrixXi overlap = Eigen::MatrixXi::Zero(k, k);
    for (Index i = 0; i < n; ++i) ++overlap(clustering.labels[i], *sorted[i]->cluster_id);
    for (int round = 0; round < k; ++round) {
      int best = -1;
      int bc = 0;
      int bh = 0;
      for (int c = 0; c < k; ++c) {
        if (rename[c] >= 0) continue;
        for (int h = 0; h < k; ++h) {
          if (!taken[h] && overlap(c, h) > best) {
            best = overlap(c, h);
            bc = c;
            bh = h;
          }
        }
      }
      rename[bc] = bh;
      taken[bh] = true;
    }
  } else {
    int next = 0;
    for (Index i = 0; i < n; ++i) {
      int& r = rename[clustering.labels[i]];
      if (r < 0) r = next++;
    }
  }

  model.centers.resize(k, 2);
  for (int c = 0; c < k; ++c) model.centers.row(rename[c]) = clustering.centers.row(c);
  for (Index i = 0; i < n; ++i) {
    model.layout_ids.push_back(sorted[i]->id);
    model.assignments[sorted[i]->id] = rename[clustering.labels[i]];
  }
  if (labelled) {
    int agree = 0;
    for (Index i = 0; i < n; ++i) agree += model.assignments[sorted[i]->id] == *sorted[i]->cluster_id;
    model.diagnostics.push_back(
        fmt::format("agreement with hand labels: {}/{} layouts", agree, static_cast<int>(n)));
  }
  return model;
}

int assign_cluster(const ClusterModel& model, const VifLayout& layout) {
  if (const auto it = model.assignments.find(layout.id); it != model.assignments.end()) {
    return it->second;
  }
  if (model.layout_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "empty cluster model");
  const VectorXd v = model.pca.project(raster_vector(rasterize_vif(layout)));
  Index best = 0;
  (model.pca_vectors.rowwise() - v.transpose()).rowwise().squaredNorm().minCoeff(&best);
  return model.assignments.at(model.layout_ids[best]);
}

nlohmann::json to_json(const ClusterModel& model) {
  nlohmann::json j;
  j["format_version"] = kFormatVersion;
  j["k"] = model.k;
  j["seed"] = model.seed;
  j["eps"] = model.eps;
  j["fallback"] = model.fallback;
  j["diagnostics"] = model.diagnostics;
  j["centers"] = matrix_json(model.centers);
  j["assignments"] = model.assignments;
  nlohmann::json layouts = nlohmann::json::array();
  for (std::size_t i = 0; i < model.layout_ids.size(); ++i) {
    const auto r = static_cast<Index>(i);
    layouts.push_back({{"id", model.layout_ids[i]},
                       {"planar", {model.planar(r, 0), model.planar(r, 1)}},
                       {"pca", matrix_json(model.pca_vectors.row(r))[0]}});
  }
  j["layouts"] = std::move(layouts);
  j["pca"] = {{"mean", std::vector<double>(model.pca.mean.data(),
                                           model.pca.mean.data() + model.pca.mean.size())},
              {"explained_variance",
               std::vector<double>(model.pca.explained_variance.data(),
                                   model.pca.explained_variance.data() +
                                       model.pca.explained_variance.size())},
              {"components", matrix_json(model.pca.basis.transpose())}};
  return j;
}

ClusterModel cluster_model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kVersionMismatch, "cluster model format version mismatch");
    }
    ClusterModel m;
    m.k = j.at("k").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.eps = j.at("eps").get<double>();
    m.fallback = j.at("fallback").get<bool>();
    m.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
    m.centers = matrix_from_json(j.at("centers"), 2);
    m.assignments = j.at("assignments").get<std::map<std::string, int>>();
    const auto& pca = j.at("pca");
    m.pca.mean = vector_from_json(pca.at("mean"));
    m.pca.explained_variance = vector_from_json(pca.at("explained_variance"));
    m.pca.basis = matrix_from_json(pca.at("components"), m.pca.mean.size()).transpose();
    const auto& layouts = j.at("layouts");
    const auto n = static_cast<Index>(layouts.size());
    m.planar.resize(n, 2);
    m.pca_vectors.resize(n, m.pca.basis.cols());
    for (Index i = 0; i < n; ++i) {
      const auto& l = layouts.at(i);
      m.layout_ids.push_back(l.at("id").get<std::string>());
      m.planar(i, 0) = l.at("planar").at(0).get<double>();
      m.planar(i, 1) = l.at("planar").at(1).get<double>();
      m.pca_vectors.row(i) = vector_from_json(l.at("pca")).transpose();
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptAsset, fmt::format("cluster model: {}", e.what()));
  }
}

}  // namespace infoforge
