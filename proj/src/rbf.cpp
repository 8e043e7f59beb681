#include "tactics/rbf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tactics/error.hpp"

namespace tactics {

std::vector<double> softmax(std::span<const double> logits, double scale) {
  std::vector<double> out(logits.size());
  if (logits.empty()) return out;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) total += (out[i] = std::exp(scale * (logits[i] - mx)));
  for (auto& v : out) v /= total;
  return out;
}

std::vector<double> masked_softmax(std::span<const double> logits, const std::vector<bool>& mask, double scale) {
  if (mask.empty()) return softmax(logits, scale);
  TACTICS_CHECK(mask.size() == logits.size(), "masked_softmax: mask size mismatch");
  std::vector<double> kept;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (mask[i]) kept.push_back(logits[i]);
  }
  TACTICS_CHECK(!kept.empty(), "masked_softmax: every entry is masked");
  const auto p = softmax(kept, scale);
  std::vector<double> out(logits.size(), 0.0);
  for (std::size_t i = 0, k = 0; i < logits.size(); ++i) {
    if (mask[i]) out[i] = p[k++];
  }
  return out;
}

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

std::vector<double> activations(const std::vector<Point>& centers, double sigma, std::span<const double> x) {
  std::vector<double> phi(centers.size());
  const double denom = 2.0 * sigma * sigma;
  for (std::size_t i = 0; i < centers.size(); ++i) phi[i] = std::exp(-sq_dist(x, centers[i]) / denom);
  return phi;
}

double median_pairwise_distance(const std::vector<Point>& centers) {
  std::vector<double> d;
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t j = i + 1; j < centers.size(); ++j) {
      const double v = std::sqrt(sq_dist(centers[i], centers[j]));
      if (v > 1e-12) d.push_back(v);
    }
  }
  if (d.empty()) return 1.0;
  std::sort(d.begin(), d.end());
  const std::size_t m = d.size() / 2;
  return d.size() % 2 ? d[m] : 0.5 * (d[m - 1] + d[m]);
}

}  // namespace

std::vector<double> RbfClassifier::scores(std::span<const double> x) const {
  if (x.size() != input_dim) {
    throw Error("rbf: input dimension " + std::to_string(x.size()) + " does not match " + std::to_string(input_dim));
  }
  const Point z = scaler ? scaler->transform(x) : Point(x.begin(), x.end());
  const auto phi = activations(centers, sigma, z);
  std::vector<double> out(num_classes(), 0.0);
  for (std::size_t i = 0; i < phi.size(); ++i) {
    for (std::size_t c = 0; c < out.size(); ++c) out[c] += weights[i][c] * phi[i];
  }
  return out;
}

std::vector<double> RbfClassifier::predict_proba(std::span<const double> x) const {
  const auto s = scores(x);
  return masked_softmax(s, observed, softmax_scale);
}

int RbfClassifier::predict(std::span<const double> x) const {
  const auto p = predict_proba(x);
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin());
}

RbfClassifier train_rbf(const std::vector<Point>& inputs, std::span<const int> targets,
                        std::vector<std::string> vocab, const RbfConfig& config) {
  if (inputs.empty()) throw Error("train_rbf: empty training set");
  TACTICS_CHECK(inputs.size() == targets.size(), "train_rbf: input/target count mismatch");
  TACTICS_CHECK(!vocab.empty(), "train_rbf: empty class vocabulary");
  if (config.n_centers < 1 || static_cast<std::size_t>(config.n_centers) > inputs.size()) {
    throw Error("train_rbf: n_centers must be in [1, number of rows]");
  }
  const std::size_t n_classes = vocab.size();
  for (int t : targets) TACTICS_CHECK(t >= 0 && static_cast<std::size_t>(t) < n_classes, "train_rbf: target out of range");

  RbfClassifier clf;
  clf.vocab = std::move(vocab);
  clf.input_dim = inputs.front().size();
  std::vector<Point> z;
  z.reserve(inputs.size());
  if (config.standardize) clf.scaler = Scaler::fit(inputs);
  for (const auto& x : inputs) {
    TACTICS_CHECK(x.size() == clf.input_dim, "train_rbf: ragged inputs");
    z.push_back(clf.scaler ? clf.scaler->transform(x) : x);
  }

  // Collapse duplicated inputs into one weighted point with summed targets,
  // in sorted order so training does not depend on row order.
  std::map<Point, std::vector<double>> grouped;
  for (std::size_t i = 0; i < z.size(); ++i) {
    auto& counts = grouped[z[i]];
    if (counts.empty()) counts.assign(n_classes, 0.0);
    counts[static_cast<std::size_t>(targets[i])] += 1.0;
  }
  std::vector<Point> uniq;
  std::vector<double> mult;
  std::vector<std::vector<double>> target_sum;
  for (auto& [point, counts] : grouped) {
    uniq.push_back(point);
    double total = 0.0;
    for (double c : counts) total += c;
    mult.push_back(total);
    target_sum.push_back(std::move(counts));
  }

  clf.observed.assign(n_classes, false);
  for (int t : targets) clf.observed[static_cast<std::size_t>(t)] = true;
  if (std::all_of(clf.observed.begin(), clf.observed.end(), [](bool b) { return b; })) clf.observed.clear();

  const int k = std::min<int>(config.n_centers, static_cast<int>(uniq.size()));
  KMeansConfig km;
  km.restarts = config.kmeans_restarts;
  km.exec = Exec::kSerial;
  clf.centers = lloyd_kmeans(uniq, mult, k, config.seed, km).centroids;
  clf.sigma = config.sigma > 0 ? config.sigma : median_pairwise_distance(clf.centers);

  const std::size_t m = clf.centers.size();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n_classes));
  std::vector<std::vector<double>> phis(uniq.size());
  for (std::size_t u = 0; u < uniq.size(); ++u) {
    phis[u] = activations(clf.centers, clf.sigma, uniq[u]);
    const auto& phi = phis[u];
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) gram(a, b) += mult[u] * phi[a] * phi[b];
      for (std::size_t c = 0; c < n_classes; ++c) rhs(a, c) += phi[a] * target_sum[u][c];
    }
  }
  gram.diagonal().array() += config.ridge;
  Eigen::MatrixXd w = gram.ldlt().solve(rhs);
  clf.weights.assign(m, std::vector<double>(n_classes));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t c = 0; c < n_classes; ++c) {
      clf.weights[a][c] = w(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
      if (!std::isfinite(clf.weights[a][c])) throw Error("train_rbf: non-finite output weights");
    }
  }

  // Inverse temperature minimizing training cross-entropy over a log grid.
  std::vector<std::vector<double>> raw(uniq.size(), std::vector<double>(n_classes, 0.0));
  for (std::size_t u = 0; u < uniq.size(); ++u) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t c = 0; c < n_classes; ++c) raw[u][c] += clf.weights[a][c] * phis[u][a];
    }
  }
  double best_nll = std::numeric_limits<double>::infinity();
  for (int g = 0; g <= 40; ++g) {
    const double scale = 0.25 * std::pow(2.0, g / 4.0);
    double nll = 0.0;
    for (std::size_t u = 0; u < uniq.size(); ++u) {
      const auto p = masked_softmax(raw[u], clf.observed, scale);
      for (std::size_t c = 0; c < n_classes; ++c) {
        if (target_sum[u][c] > 0) nll -= target_sum[u][c] * std::log(std::max(p[c], 1e-300));
      }
    }
    if (nll < best_nll - 1e-12) {
      best_nll = nll;
      clf.softmax_scale = scale;
    }
  }
  return clf;
}

void to_json(json& j, const RbfClassifier& c) {
  j = json{{"centers", c.centers}, {"sigma", c.sigma},           {"weights", c.weights},
           {"vocab", c.vocab},     {"softmax_scale", c.softmax_scale}, {"input_dim", c.input_dim}};
  if (c.scaler) j["scaler"] = *c.scaler;
  if (!c.observed.empty()) j["observed"] = c.observed;
}

void from_json(const json& j, RbfClassifier& c) {
  c.centers = j.at("centers").get<std::vector<Point>>();
  c.sigma = j.at("sigma").get<double>();
  c.weights = j.at("weights").get<std::vector<std::vector<double>>>();
  c.vocab = j.at("vocab").get<std::vector<std::string>>();
  c.softmax_scale = j.value("softmax_scale", 1.0);
  c.input_dim = j.at("input_dim").get<std::size_t>();
  if (j.contains("scaler")) c.scaler = j.at("scaler").get<Scaler>();
  else c.scaler.reset();
  c.observed = j.value("observed", std::vector<bool>{});
  if (!c.observed.empty() && c.observed.size() != c.vocab.size()) throw Error("rbf classifier: observed mask does not match vocabulary");
  if (!(c.sigma > 0)) throw Error("rbf classifier: sigma must be positive");
  if (c.vocab.empty()) throw Error("rbf classifier: empty vocabulary");
  if (c.weights.size() != c.centers.size()) throw Error("rbf classifier: weight rows do not match centers");
}

}  // namespace tactics
