#pragma once

#include <Eigen/Dense>
#include <array>
#include <limits>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "p300/dsp.hpp"

namespace p300 {

// Binary training data: one row per feature vector, labels 1 = P300,
// 0 = non-P300. Priors default to empirical class frequencies.
struct TrainingSet {
  Eigen::MatrixXd x;
  Eigen::VectorXi y;
  std::optional<std::array<double, 2>> class_priors;

  static TrainingSet from_features(const std::vector<FeatureVector>& features);

  long n_examples() const { return x.rows(); }
  long dim() const { return x.cols(); }
};

struct BayesLdaModel {
  Eigen::VectorXd mu0;
  Eigen::VectorXd mu1;
  Eigen::MatrixXd sigma_inv;
  std::array<double, 2> log_priors{0.0, 0.0};
  double shrinkage = 0.0;
  // Cached affine form of g1(x) - g0(x), derived from the fields above.
  Eigen::VectorXd weight;
  double bias = 0.0;
};

struct LinearSvmModel {
  Eigen::VectorXd w;
  double b = 0.0;
  double c = 0.0;
};

struct LassoGlmModel {
  double beta0 = 0.0;
  Eigen::VectorXd beta;
  double lambda = 0.0;
};

// Shared covariance is blended toward (trace/d) * identity by `shrinkage`
// before inversion. Discriminant per class:
//   g_k(x) = x' sigma_inv mu_k - mu_k' sigma_inv mu_k / 2 + log prior_k
BayesLdaModel train_bayes_lda(const TrainingSet& data, double shrinkage = 0.1);
double score_bayes_lda(const BayesLdaModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& x);

struct SvmTrainDiagnostics {
  // Dual objective alpha'Q alpha / 2 - sum(alpha) after every pair update;
  // exact two-variable minimization makes this non-increasing.
  std::vector<double> dual_objective_trace;
  long iterations = 0;
  double kkt_gap = 0.0;
};

// Minimizes ||w||^2 / 2 + C * sum hinge(y_i (w.x_i + b)) with the bias left
// out of the regularizer. Solved on the dual by deterministic max-violating
// pair updates; the bias comes from an exact breakpoint scan afterwards.
LinearSvmModel train_linear_svm(const TrainingSet& data, double c,
                                SvmTrainDiagnostics* diag = nullptr,
                                double epsilon = 1e-6,
                                long max_iterations = 1000000);
double score_linear_svm(const LinearSvmModel& model,
                        const Eigen::Ref<const Eigen::VectorXd>& x);

double svm_primal_objective(const LinearSvmModel& model,
                            const TrainingSet& data);

// Coordinate-descent lasso on the binomial deviance:
//   (1/N) * Deviance(beta0, beta) + lambda * sum |beta_j|
// with the intercept unpenalized. Converged when no coefficient moves by
// more than 1e-6 across an outer reweighting step.
LassoGlmModel train_lasso_glm(const TrainingSet& data, double lambda,
                              const LassoGlmModel* warm_start = nullptr);
double score_lasso_glm(const LassoGlmModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& x);

// Deviance = -2 * binomial log-likelihood of the logistic model.
double binomial_deviance(const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y,
                         double beta0,
                         const Eigen::Ref<const Eigen::VectorXd>& beta);
// Gradient of the deviance with respect to (beta0, beta), length dim + 1
// with the intercept derivative first.
Eigen::VectorXd binomial_deviance_gradient(
    const Eigen::Ref<const Eigen::MatrixXd>& x,
    const Eigen::Ref<const Eigen::VectorXi>& y, double beta0,
    const Eigen::Ref<const Eigen::VectorXd>& beta);

double lasso_objective(const TrainingSet& data, const LassoGlmModel& model);

// Smallest lambda at which the all-intercept model is already optimal.
double lasso_lambda_max(const TrainingSet& data);

enum class ClassifierFamily { kBayesLda, kLinearSvm, kLassoGlm };

ClassifierFamily family_from_name(const std::string& name);
std::string family_name(ClassifierFamily family);

struct TrainedClassifier {
  ClassifierFamily family = ClassifierFamily::kBayesLda;
  std::variant<BayesLdaModel, LinearSvmModel, LassoGlmModel> model;

  double score(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  long dim() const;
};

// Uniform dispatch. `hyper` is the family's scalar hyperparameter (LDA
// shrinkage, SVM C, lasso lambda); pass NaN to use the defaults: 0.1 for
// shrinkage, and inner 5-fold cross-validation for C (log grid 1e-3..1e2)
// and lambda (20-point log path from lambda_max down to 1e-3 * lambda_max).
TrainedClassifier train(ClassifierFamily family, const TrainingSet& data,
                        double hyper = std::numeric_limits<double>::quiet_NaN());

}  // namespace p300
