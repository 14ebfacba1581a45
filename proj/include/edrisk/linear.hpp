#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include "edrisk/featurize.hpp"

namespace edrisk {

struct LogisticHyperparams {
  double l2 = 1e-4;          // not applied to the intercept
  double learning_rate = 1.0;
  int max_epochs = 500;
  double tolerance = 1e-8;   // relative loss change
};

struct LogisticModel {
  std::vector<double> weights;  // dense, one per column
  double intercept = 0.0;
  std::uint32_t dimension = 0;
  LogisticHyperparams hyper;
  double final_loss = 0.0;
  int epochs_run = 0;
  std::vector<double> epoch_losses;
};

// Real-valued sparse row, used by the ensemble's meta stage.
struct SparseEntry {
  std::uint32_t index;
  double value;
};
using SparseRow = std::vector<SparseEntry>;

// Full-batch gradient descent with backtracking step halving; minimizes the
// mean logistic log-loss plus (l2/2)*||w||^2.
LogisticModel fit_logistic(const std::vector<FeatureVector>& X, const std::vector<std::uint8_t>& y,
                           const LogisticHyperparams& hyper = {});
LogisticModel fit_logistic_rows(const std::vector<SparseRow>& X, std::uint32_t dimension,
                                const std::vector<std::uint8_t>& y,
                                const LogisticHyperparams& hyper = {});

double predict_logistic(const LogisticModel& model, const FeatureVector& x);
double predict_logistic_row(const LogisticModel& model, const SparseRow& x);

// Regularized mean log-loss of a parameter vector; exposed for test oracles.
double logistic_loss(const std::vector<FeatureVector>& X, const std::vector<std::uint8_t>& y,
                     const std::vector<double>& weights, double intercept, double l2);

// Analytic gradient at (weights, intercept); exposed for the
// finite-difference checks. Returns d/dw per column plus d/db last.
std::vector<double> logistic_gradient(const std::vector<FeatureVector>& X,
                                      const std::vector<std::uint8_t>& y,
                                      const std::vector<double>& weights, double intercept,
                                      double l2);

std::vector<std::tuple<std::string, std::string, double>> top_coefficients(
    const LogisticModel& model, const FeatureVocabulary& vocab, int k);

struct NaiveBayesModel {
  std::uint32_t dimension = 0;
  double alpha = 1.0;
  std::array<double, 2> log_prior{};                 // [negative, positive]
  std::array<std::vector<double>, 2> log_present;    // per class, per column
  std::array<std::vector<double>, 2> log_absent;
  std::array<double, 2> sum_log_absent{};            // cached total per class
};

// Bernoulli conditionals with additive smoothing:
// P(present | class) = (count + alpha) / (class_count + 2*alpha).
NaiveBayesModel fit_naive_bayes(const std::vector<FeatureVector>& X,
                                const std::vector<std::uint8_t>& y, double alpha = 1.0);

std::array<double, 2> naive_bayes_posteriors(const NaiveBayesModel& model, const FeatureVector& x);
double predict_naive_bayes(const NaiveBayesModel& model, const FeatureVector& x);

}  // namespace edrisk
