#include "edrisk/linear.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edrisk/util.hpp"

namespace edrisk {

namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + e^z) without overflow.
double softplus(double z) {
  if (z > 0.0) return z + std::log1p(std::exp(-z));
  return std::log1p(std::exp(z));
}

struct BinaryRows {
  const std::vector<FeatureVector>& X;
  std::size_t size() const { return X.size(); }
  double dot(std::size_t i, const std::vector<double>& w) const {
    double s = 0.0;
    for (std::uint32_t j : X[i].active) s += w[j];
    return s;
  }
  void add_scaled(std::size_t i, double c, std::vector<double>& g) const {
    for (std::uint32_t j : X[i].active) g[j] += c;
  }
};

struct ValuedRows {
  const std::vector<SparseRow>& X;
  std::size_t size() const { return X.size(); }
  double dot(std::size_t i, const std::vector<double>& w) const {
    double s = 0.0;
    for (const SparseEntry& e : X[i]) s += w[e.index] * e.value;
    return s;
  }
  void add_scaled(std::size_t i, double c, std::vector<double>& g) const {
    for (const SparseEntry& e : X[i]) g[e.index] += c * e.value;
  }
};

template <typename Rows>
double loss_at(const Rows& rows, const std::vector<std::uint8_t>& y, const std::vector<double>& w,
               double b, double l2) {
  const std::size_t n = rows.size();
  double nll = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = b + rows.dot(i, w);
    nll += softplus(z) - (y[i] ? z : 0.0);
  }
  double reg = 0.0;
  for (double wj : w) reg += wj * wj;
  return nll / static_cast<double>(n) + 0.5 * l2 * reg;
}

template <typename Rows>
void gradient_at(const Rows& rows, const std::vector<std::uint8_t>& y, const std::vector<double>& w,
                 double b, double l2, std::vector<double>& gw, double& gb) {
  const std::size_t n = rows.size();
  std::fill(gw.begin(), gw.end(), 0.0);
  gb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = sigmoid(b + rows.dot(i, w)) - (y[i] ? 1.0 : 0.0);
    rows.add_scaled(i, r, gw);
    gb += r;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < gw.size(); ++j) gw[j] = gw[j] * inv_n + l2 * w[j];
  gb *= inv_n;
}

template <typename Rows>
LogisticModel fit_impl(const Rows& rows, std::uint32_t dimension,
                       const std::vector<std::uint8_t>& y, const LogisticHyperparams& hyper) {
  const std::size_t n = rows.size();
  if (n == 0) throw Error("fit_logistic: empty training data");
  if (y.size() != n) throw Error("fit_logistic: label count mismatch");

  LogisticModel model;
  model.dimension = dimension;
  model.hyper = hyper;
  model.weights.assign(dimension, 0.0);

  std::vector<double> gw(dimension, 0.0);
  std::vector<double> trial_w(dimension, 0.0);
  double gb = 0.0;
  double step = hyper.learning_rate;
  double loss = loss_at(rows, y, model.weights, model.intercept, hyper.l2);
  model.epoch_losses.push_back(loss);

  for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
    gradient_at(rows, y, model.weights, model.intercept, hyper.l2, gw, gb);
    step *= 2.0;  // optimistic growth; backtracking pulls it down again

    double trial_loss = 0.0;
    double trial_b = 0.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      for (std::size_t j = 0; j < dimension; ++j) trial_w[j] = model.weights[j] - step * gw[j];
      trial_b = model.intercept - step * gb;
      trial_loss = loss_at(rows, y, trial_w, trial_b, hyper.l2);
      if (std::isfinite(trial_loss) && trial_loss <= loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (!std::isfinite(trial_loss))
        throw Error("fit_logistic: divergence (non-finite loss) at epoch " + std::to_string(epoch));
      // No descent direction at representable step size: converged.
      break;
    }
    model.weights.swap(trial_w);
    model.intercept = trial_b;
    const double improvement = loss - trial_loss;
    loss = trial_loss;
    model.epoch_losses.push_back(loss);
    model.epochs_run = epoch;
    if (improvement <= hyper.tolerance * std::max(1.0, std::abs(loss))) break;
  }
  model.final_loss = loss;
  return model;
}

}  // namespace

LogisticModel fit_logistic(const std::vector<FeatureVector>& X, const std::vector<std::uint8_t>& y,
                           const LogisticHyperparams& hyper) {
  std::uint32_t dim = X.empty() ? 0 : X.front().dimension;
  for (const FeatureVector& x : X)
    if (x.dimension != dim) throw Error("fit_logistic: inconsistent dimensions");
  return fit_impl(BinaryRows{X}, dim, y, hyper);
}

LogisticModel fit_logistic_rows(const std::vector<SparseRow>& X, std::uint32_t dimension,
                                const std::vector<std::uint8_t>& y,
                                const LogisticHyperparams& hyper) {
  for (const SparseRow& row : X)
    for (const SparseEntry& e : row)
      if (e.index >= dimension) throw Error("fit_logistic: index out of range");
  return fit_impl(ValuedRows{X}, dimension, y, hyper);
}

double predict_logistic(const LogisticModel& model, const FeatureVector& x) {
  if (x.dimension != model.dimension)
    throw Error("predict_logistic: dimension mismatch: vector " + std::to_string(x.dimension) +
                " vs model " + std::to_string(model.dimension));
  double z = model.intercept;
  for (std::uint32_t j : x.active) z += model.weights[j];
  return sigmoid(z);
}

double predict_logistic_row(const LogisticModel& model, const SparseRow& x) {
  double z = model.intercept;
  for (const SparseEntry& e : x) {
    if (e.index >= model.dimension) throw Error("predict_logistic: dimension mismatch");
    z += model.weights[e.index] * e.value;
  }
  return sigmoid(z);
}

double logistic_loss(const std::vector<FeatureVector>& X, const std::vector<std::uint8_t>& y,
                     const std::vector<double>& weights, double intercept, double l2) {
  return loss_at(BinaryRows{X}, y, weights, intercept, l2);
}

std::vector<double> logistic_gradient(const std::vector<FeatureVector>& X,
                                      const std::vector<std::uint8_t>& y,
                                      const std::vector<double>& weights, double intercept,
                                      double l2) {
  std::vector<double> gw(weights.size(), 0.0);
  double gb = 0.0;
  gradient_at(BinaryRows{X}, y, weights, intercept, l2, gw, gb);
  gw.push_back(gb);
  return gw;
}

std::vector<std::tuple<std::string, std::string, double>> top_coefficients(
    const LogisticModel& model, const FeatureVocabulary& vocab, int k) {
  if (k <= 0) throw Error("top_coefficients: k must be positive");
  if (vocab.dimension() != model.dimension)
    throw Error("top_coefficients: vocabulary/model dimension mismatch");

  std::vector<std::uint32_t> order(model.dimension);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    const double ma = std::abs(model.weights[a]);
    const double mb = std::abs(model.weights[b]);
    if (ma != mb) return ma > mb;
    return a < b;
  });
  const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(k), order.size());
  std::vector<std::tuple<std::string, std::string, double>> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const auto& [field, value] = vocab.entries()[order[i]];
    out.emplace_back(field, value, model.weights[order[i]]);
  }
  return out;
}

NaiveBayesModel fit_naive_bayes(const std::vector<FeatureVector>& X,
                                const std::vector<std::uint8_t>& y, double alpha) {
  if (X.empty()) throw Error("fit_naive_bayes: empty training data");
  if (y.size() != X.size()) throw Error("fit_naive_bayes: label count mismatch");
  if (alpha <= 0.0) throw Error("fit_naive_bayes: alpha must be positive");
  const std::uint32_t dim = X.front().dimension;
  for (const FeatureVector& x : X)
    if (x.dimension != dim) throw Error("fit_naive_bayes: inconsistent dimensions");

  NaiveBayesModel model;
  model.dimension = dim;
  model.alpha = alpha;

  std::array<std::vector<std::uint64_t>, 2> present_counts;
  present_counts[0].assign(dim, 0);
  present_counts[1].assign(dim, 0);
  std::array<std::uint64_t, 2> class_counts{0, 0};
  for (std::size_t i = 0; i < X.size(); ++i) {
    const int c = y[i] ? 1 : 0;
    ++class_counts[static_cast<std::size_t>(c)];
    for (std::uint32_t j : X[i].active) ++present_counts[static_cast<std::size_t>(c)][j];
  }

  const double n = static_cast<double>(X.size());
  for (int c = 0; c < 2; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    model.log_prior[ci] = std::log(static_cast<double>(class_counts[ci]) / n);
    model.log_present[ci].resize(dim);
    model.log_absent[ci].resize(dim);
    const double denom = static_cast<double>(class_counts[ci]) + 2.0 * alpha;
    double total_absent = 0.0;
    for (std::uint32_t j = 0; j < dim; ++j) {
      const double p = (static_cast<double>(present_counts[ci][j]) + alpha) / denom;
      model.log_present[ci][j] = std::log(p);
      model.log_absent[ci][j] = std::log1p(-p);
      total_absent += model.log_absent[ci][j];
    }
    model.sum_log_absent[ci] = total_absent;
  }
  return model;
}

std::array<double, 2> naive_bayes_posteriors(const NaiveBayesModel& model, const FeatureVector& x) {
  if (x.dimension != model.dimension)
    throw Error("predict_naive_bayes: dimension mismatch: vector " + std::to_string(x.dimension) +
                " vs model " + std::to_string(model.dimension));
  std::array<double, 2> score;
  for (int c = 0; c < 2; ++c) {
    const std::size_t ci = static_cast<std::size_t>(c);
    double s = model.log_prior[ci] + model.sum_log_absent[ci];
    for (std::uint32_t j : x.active) s += model.log_present[ci][j] - model.log_absent[ci][j];
    score[ci] = s;
  }
  const double m = std::max(score[0], score[1]);
  const double lse = m + std::log(std::exp(score[0] - m) + std::exp(score[1] - m));
  return {std::exp(score[0] - lse), std::exp(score[1] - lse)};
}

double predict_naive_bayes(const NaiveBayesModel& model, const FeatureVector& x) {
  return naive_bayes_posteriors(model, x)[1];
}

}  // namespace edrisk
