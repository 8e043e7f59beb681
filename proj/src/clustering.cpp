#include "tactics/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tactics/error.hpp"
#include "tactics/rng.hpp"

namespace tactics {

Scaler Scaler::fit(const std::vector<Point>& points) {
  TACTICS_CHECK(!points.empty(), "Scaler::fit: no points");
  const std::size_t dim = points.front().size();
  Scaler s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);
  for (const auto& p : points) {
    for (std::size_t d = 0; d < dim; ++d) s.mean[d] += p[d];
  }
  for (auto& m : s.mean) m /= static_cast<double>(points.size());
  for (const auto& p : points) {
    for (std::size_t d = 0; d < dim; ++d) s.stddev[d] += (p[d] - s.mean[d]) * (p[d] - s.mean[d]);
  }
  for (auto& v : s.stddev) {
    v = std::sqrt(v / static_cast<double>(points.size()));
    if (!(v > 1e-12)) v = 1.0;
  }
  return s;
}

Point Scaler::transform(std::span<const double> x) const {
  TACTICS_CHECK(x.size() == mean.size(), "Scaler::transform: dimension mismatch");
  Point out(x.size());
  for (std::size_t d = 0; d < x.size(); ++d) out[d] = (x[d] - mean[d]) / stddev[d];
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double t = a[d] - b[d];
    s += t * t;
  }
  return s;
}

double weight_at(std::span<const double> w, std::size_t i) { return w.empty() ? 1.0 : w[i]; }

}  // namespace

int nearest_centroid(const std::vector<Point>& centroids, std::span<const double> x) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = sq_dist(centroids[c], x);
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  return best;
}

double inertia(const std::vector<Point>& points, std::span<const double> weights,
               const std::vector<Point>& centroids, std::span<const int> labels) {
  double s = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    s += weight_at(weights, i) * sq_dist(points[i], centroids[static_cast<std::size_t>(labels[i])]);
  }
  return s;
}

KMeansRun lloyd_run(const std::vector<Point>& points, std::span<const double> weights, int k, std::uint64_t seed,
                    int max_iterations) {
  const std::size_t n = points.size();
  TACTICS_CHECK(k >= 1, "kmeans: k must be at least 1");
  TACTICS_CHECK(static_cast<std::size_t>(k) <= n, "kmeans: k exceeds the number of points");
  TACTICS_CHECK(weights.empty() || weights.size() == n, "kmeans: weight count mismatch");
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    TACTICS_CHECK(p.size() == dim, "kmeans: ragged points");
    for (double v : p) TACTICS_CHECK(std::isfinite(v), "kmeans: non-finite feature");
  }

  Rng rng(seed);
  KMeansRun run;

  // k-means++ seeding.
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = weight_at(weights, i);
  run.centroids.push_back(points[sample_weighted(rng, w)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = sq_dist(points[i], run.centroids[0]);
  while (run.centroids.size() < static_cast<std::size_t>(k)) {
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += (p[i] = w[i] * d2[i]);
    // All remaining mass sits on existing centroids: duplicate one.
    const std::size_t pick = total > 0.0 ? sample_weighted(rng, p) : sample_weighted(rng, w);
    run.centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], sq_dist(points[i], run.centroids.back()));
  }

  run.labels.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) run.labels[i] = nearest_centroid(run.centroids, points[i]);
  run.inertia_trace.push_back(inertia(points, weights, run.centroids, run.labels));

  for (int iter = 0; iter < max_iterations; ++iter) {
    run.iterations = iter + 1;
    // Update step.
    std::vector<Point> sums(static_cast<std::size_t>(k), Point(dim, 0.0));
    std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(run.labels[i]);
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += w[i] * points[i][d];
      mass[c] += w[i];
      counts[c]++;
    }
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (mass[c] > 0.0) {
        for (std::size_t d = 0; d < dim; ++d) run.centroids[c][d] = sums[c][d] / mass[c];
      }
    }
    // Empty-cluster repair: move the point farthest from its centroid (taken
    // from a cluster that keeps at least one member) into the empty cluster.
    for (std::size_t c = 0; c < sums.size(); ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = n;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto from = static_cast<std::size_t>(run.labels[i]);
        if (counts[from] < 2) continue;
        const double d = sq_dist(points[i], run.centroids[from]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) continue;
      const auto from = static_cast<std::size_t>(run.labels[far]);
      counts[from]--;
      mass[from] -= w[far];
      for (std::size_t d = 0; d < dim; ++d) sums[from][d] -= w[far] * points[far][d];
      if (mass[from] > 0.0) {
        for (std::size_t d = 0; d < dim; ++d) run.centroids[from][d] = sums[from][d] / mass[from];
      }
      run.centroids[c] = points[far];
      run.labels[far] = static_cast<int>(c);
      counts[c] = 1;
      mass[c] = w[far];
      sums[c] = points[far];
      for (auto& v : sums[c]) v *= w[far];
    }

    // Assignment step.
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int c = nearest_centroid(run.centroids, points[i]);
      if (c != run.labels[i]) {
        run.labels[i] = c;
        changed = true;
      }
    }
    run.inertia_trace.push_back(inertia(points, weights, run.centroids, run.labels));
    if (!changed) break;
  }
  run.inertia = run.inertia_trace.back();
  return run;
}

KMeansRun lloyd_kmeans(const std::vector<Point>& points, std::span<const double> weights, int k, std::uint64_t seed,
                       const KMeansConfig& config) {
  TACTICS_CHECK(config.restarts >= 1, "kmeans: restarts must be positive");
  auto runs = config.exec == Exec::kParallel
                  ? kernels::kmeans_restarts_omp(points, weights, k, seed, config.restarts, config.max_iterations)
                  : kernels::kmeans_restarts_serial(points, weights, k, seed, config.restarts, config.max_iterations);
  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].inertia < runs[best].inertia) best = r;
  }
  return std::move(runs[best]);
}

int StyleClusterSet::style_of(const TeamId& team) const {
  auto it = assignments.find(team);
  if (it == assignments.end()) throw NotFound("team '" + team + "' has no style assignment");
  return it->second;
}

namespace {

std::vector<Point> raw_points(const StyleTable& features) {
  std::vector<Point> pts;
  pts.reserve(features.size());
  for (const auto& [team, f] : features) {
    f.validate();
    auto a = f.as_array();
    pts.emplace_back(a.begin(), a.end());
  }
  return pts;
}

}  // namespace

StyleClusterSet kmeans(const StyleTable& features, int k, std::uint64_t seed, const KMeansConfig& config) {
  if (k < 1) throw Error("kmeans: k must be at least 1");
  if (static_cast<std::size_t>(k) > features.size()) throw Error("kmeans: k exceeds the number of teams");
  auto raw = raw_points(features);
  StyleClusterSet set;
  set.k = k;
  set.scaler = Scaler::fit(raw);
  std::vector<Point> scaled;
  scaled.reserve(raw.size());
  for (const auto& p : raw) scaled.push_back(set.scaler.transform(p));
  auto run = lloyd_kmeans(scaled, {}, k, seed, config);
  set.centroids = std::move(run.centroids);
  set.inertia = run.inertia;
  for (std::size_t i = 0; i < features.size(); ++i) set.assignments[features[i].first] = run.labels[i];
  return set;
}

std::vector<double> inertia_curve(const StyleTable& features, int k_max, std::uint64_t seed,
                                  const KMeansConfig& config) {
  std::vector<double> curve;
  for (int k = 1; k <= k_max; ++k) curve.push_back(kmeans(features, k, seed, config).inertia);
  return curve;
}

int elbow_from_curve(std::span<const double> inertia_by_k) {
  const auto k_max = static_cast<int>(inertia_by_k.size());
  TACTICS_CHECK(k_max >= 2, "elbow: k_max must be at least 2");
  if (k_max == 2) return 2;
  const double x1 = 1.0, y1 = inertia_by_k.front();
  const double x2 = k_max, y2 = inertia_by_k.back();
  const double norm = std::hypot(x2 - x1, y2 - y1);
  int best = 2;
  double best_d = -1.0;
  const double tol = 1e-12 * std::max(1.0, std::abs(y1));
  for (int k = 2; k < k_max; ++k) {
    const double y = inertia_by_k[static_cast<std::size_t>(k - 1)];
    const double d = std::abs((y2 - y1) * (k - x1) - (x2 - x1) * (y - y1)) / norm;
    if (d > best_d + tol) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

int elbow_select_k(const StyleTable& features, int k_max, std::uint64_t seed, const KMeansConfig& config) {
  if (k_max < 2) throw Error("elbow_select_k: k_max must be at least 2");
  return elbow_from_curve(inertia_curve(features, k_max, seed, config));
}

int assign_style(const StyleClusterSet& clusters, const StyleFeatures& features) {
  for (double v : features.as_array()) {
    if (!std::isfinite(v)) throw Error("assign_style: non-finite features");
  }
  TACTICS_CHECK(!clusters.centroids.empty(), "assign_style: cluster set not fitted");
  auto a = features.as_array();
  return nearest_centroid(clusters.centroids, clusters.scaler.transform(a));
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  TACTICS_CHECK(a.size() == b.size(), "adjusted_rand_index: label count mismatch");
  const std::size_t n = a.size();
  if (n < 2) return 1.0;
  std::map<std::pair<int, int>, double> table;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    table[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto c2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [key, v] : table) index += c2(v);
  for (const auto& [key, v] : rows) sum_rows += c2(v);
  for (const auto& [key, v] : cols) sum_cols += c2(v);
  const double expected = sum_rows * sum_cols / c2(static_cast<double>(n));
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

void to_json(json& j, const Scaler& s) { j = json{{"mean", s.mean}, {"stddev", s.stddev}}; }

void from_json(const json& j, Scaler& s) {
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
}

void to_json(json& j, const StyleClusterSet& c) {
  j = json{{"k", c.k}, {"centroids", c.centroids}, {"scaler", c.scaler}, {"assignments", c.assignments},
           {"inertia", c.inertia}};
}

void from_json(const json& j, StyleClusterSet& c) {
  c.k = j.at("k").get<int>();
  c.centroids = j.at("centroids").get<std::vector<Point>>();
  c.scaler = j.at("scaler").get<Scaler>();
  c.assignments = j.at("assignments").get<std::map<TeamId, int>>();
  c.inertia = j.value("inertia", 0.0);
  if (static_cast<int>(c.centroids.size()) != c.k) throw Error("cluster set: centroid count does not match k");
}

}  // namespace tactics
