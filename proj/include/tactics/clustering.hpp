#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "tactics/domain.hpp"
#include "tactics/exec.hpp"
#include "tactics/io.hpp"

namespace tactics {

using Point = std::vector<double>;

// Per-feature standardization; zero-variance features keep unit scale.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> stddev;

  static Scaler fit(const std::vector<Point>& points);
  Point transform(std::span<const double> x) const;
};

struct KMeansConfig {
  int restarts = 10;
  int max_iterations = 300;
  Exec exec = Exec::kParallel;
};

struct KMeansRun {
  std::vector<Point> centroids;
  std::vector<int> labels;
  double inertia = 0.0;
  // Inertia after every assignment step, starting with the seeding.
  std::vector<double> inertia_trace;
  int iterations = 0;
  int restart = 0;
};

// Weighted within-cluster sum of squares for a labelling.
double inertia(const std::vector<Point>& points, std::span<const double> weights,
               const std::vector<Point>& centroids, std::span<const int> labels);

// Nearest centroid by squared Euclidean distance, lowest index on ties.
int nearest_centroid(const std::vector<Point>& centroids, std::span<const double> x);

// One Lloyd run from k-means++ seeding. `weights` (empty = all ones) lets
// duplicated points be collapsed into a single weighted point.
KMeansRun lloyd_run(const std::vector<Point>& points, std::span<const double> weights, int k, std::uint64_t seed,
                    int max_iterations);

// Best of `config.restarts` runs by inertia, ties to the lower restart index.
// Restart r is seeded with derive_seed(seed, r).
KMeansRun lloyd_kmeans(const std::vector<Point>& points, std::span<const double> weights, int k, std::uint64_t seed,
                       const KMeansConfig& config = {});

namespace kernels {
std::vector<KMeansRun> kmeans_restarts_serial(const std::vector<Point>& points, std::span<const double> weights,
                                              int k, std::uint64_t seed, int restarts, int max_iterations);
std::vector<KMeansRun> kmeans_restarts_omp(const std::vector<Point>& points, std::span<const double> weights,
                                           int k, std::uint64_t seed, int restarts, int max_iterations);
}  // namespace kernels

// Playing-style types. Centroids live in the standardized feature space.
struct StyleClusterSet {
  int k = 0;
  std::vector<Point> centroids;
  Scaler scaler;
  std::map<TeamId, int> assignments;
  double inertia = 0.0;

  int style_of(const TeamId& team) const;
};

StyleClusterSet kmeans(const StyleTable& features, int k, std::uint64_t seed, const KMeansConfig& config = {});

// Inertia of the best-of-restarts solution for k = 1..k_max.
std::vector<double> inertia_curve(const StyleTable& features, int k_max, std::uint64_t seed,
                                  const KMeansConfig& config = {});

// Kneedle rule on an inertia curve indexed from k = 1: the interior k with the
// largest perpendicular distance from the chord joining the endpoints, ties
// to the smaller k.
int elbow_from_curve(std::span<const double> inertia_by_k);

int elbow_select_k(const StyleTable& features, int k_max, std::uint64_t seed, const KMeansConfig& config = {});

int assign_style(const StyleClusterSet& clusters, const StyleFeatures& features);

double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

void to_json(json& j, const Scaler& s);
void from_json(const json& j, Scaler& s);
void to_json(json& j, const StyleClusterSet& c);
void from_json(const json& j, StyleClusterSet& c);

}  // namespace tactics
