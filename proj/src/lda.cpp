#include <Eigen/Cholesky>
#include <cmath>

#include "p300/classifiers.hpp"
#include "p300/error.hpp"

namespace p300 {

BayesLdaModel train_bayes_lda(const TrainingSet& data, double shrinkage) {
  if (data.n_examples() == 0) throw EmptyInput("train_bayes_lda");
  if (!(shrinkage >= 0.0 && shrinkage <= 1.0)) {
    throw Error("shrinkage must lie in [0, 1], got " + std::to_string(shrinkage));
  }
  const long n = data.n_examples();
  const long d = data.dim();

  long n0 = 0, n1 = 0;
  for (long i = 0; i < n; ++i) (data.y[i] ? n1 : n0)++;
  if (n0 < 2 || n1 < 2) {
    throw DegenerateClass("need at least 2 examples per class, got " +
                          std::to_string(n0) + " / " + std::to_string(n1));
  }

  BayesLdaModel model;
  model.shrinkage = shrinkage;
  model.mu0 = Eigen::VectorXd::Zero(d);
  model.mu1 = Eigen::VectorXd::Zero(d);
  for (long i = 0; i < n; ++i) {
    (data.y[i] ? model.mu1 : model.mu0) += data.x.row(i).transpose();
  }
  model.mu0 /= static_cast<double>(n0);
  model.mu1 /= static_cast<double>(n1);

  // Pooled within-class covariance with the usual n - 2 denominator.
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(d, d);
  for (long i = 0; i < n; ++i) {
    const Eigen::VectorXd dev =
        data.x.row(i).transpose() - (data.y[i] ? model.mu1 : model.mu0);
    sigma.noalias() += dev * dev.transpose();
  }
  sigma /= static_cast<double>(n - 2);

  const double avg_var = sigma.trace() / static_cast<double>(d);
  Eigen::MatrixXd shrunk =
      (1.0 - shrinkage) * sigma +
      shrinkage * avg_var * Eigen::MatrixXd::Identity(d, d);

  Eigen::LLT<Eigen::MatrixXd> llt(shrunk);
  if (llt.info() != Eigen::Success) {
    throw SingularCovariance(
        "pooled covariance not positive definite at shrinkage " +
        std::to_string(shrinkage));
  }
  model.sigma_inv = llt.solve(Eigen::MatrixXd::Identity(d, d));

  double p0, p1;
  if (data.class_priors) {
    p0 = (*data.class_priors)[0];
    p1 = (*data.class_priors)[1];
    if (!(p0 > 0.0 && p1 > 0.0 && std::abs(p0 + p1 - 1.0) < 1e-9)) {
      throw Error("class priors must be positive and sum to 1");
    }
  } else {
    p0 = static_cast<double>(n0) / static_cast<double>(n);
    p1 = static_cast<double>(n1) / static_cast<double>(n);
  }
  model.log_priors = {std::log(p0), std::log(p1)};

  model.weight = model.sigma_inv * (model.mu1 - model.mu0);
  model.bias = -0.5 * (model.mu1.dot(model.sigma_inv * model.mu1) -
                       model.mu0.dot(model.sigma_inv * model.mu0)) +
               model.log_priors[1] - model.log_priors[0];
  return model;
}

double score_bayes_lda(const BayesLdaModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.weight.size()) {
    throw DimensionMismatch(model.weight.size(), x.size());
  }
  return model.weight.dot(x) + model.bias;
}

}  // namespace p300
