#include <algorithm>
#include <cmath>

#include "p300/classifiers.hpp"
#include "p300/error.hpp"

namespace p300 {

namespace {

double softplus(double eta) {
  return std::max(eta, 0.0) + std::log1p(std::exp(-std::abs(eta)));
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

double binomial_deviance(const Eigen::Ref<const Eigen::MatrixXd>& x,
                         const Eigen::Ref<const Eigen::VectorXi>& y,
                         double beta0,
                         const Eigen::Ref<const Eigen::VectorXd>& beta) {
  if (x.cols() != beta.size()) throw DimensionMismatch(x.cols(), beta.size());
  if (x.rows() != y.size()) throw DimensionMismatch(x.rows(), y.size());
  const Eigen::VectorXd eta =
      (x * beta).array() + beta0;
  double ll = 0.0;
  for (long i = 0; i < x.rows(); ++i) {
    ll += static_cast<double>(y[i]) * eta[i] - softplus(eta[i]);
  }
  return -2.0 * ll;
}

Eigen::VectorXd binomial_deviance_gradient(
    const Eigen::Ref<const Eigen::MatrixXd>& x,
    const Eigen::Ref<const Eigen::VectorXi>& y, double beta0,
    const Eigen::Ref<const Eigen::VectorXd>& beta) {
  if (x.cols() != beta.size()) throw DimensionMismatch(x.cols(), beta.size());
  const Eigen::VectorXd eta = (x * beta).array() + beta0;
  Eigen::VectorXd resid(x.rows());
  for (long i = 0; i < x.rows(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-eta[i]));
    resid[i] = p - static_cast<double>(y[i]);
  }
  Eigen::VectorXd grad(x.cols() + 1);
  grad[0] = 2.0 * resid.sum();
  grad.tail(x.cols()) = 2.0 * (x.transpose() * resid);
  return grad;
}

double lasso_lambda_max(const TrainingSet& data) {
  if (data.n_examples() == 0) throw EmptyInput("lasso_lambda_max");
  const double n = static_cast<double>(data.n_examples());
  const double ybar = data.y.cast<double>().mean();
  const Eigen::VectorXd resid =
      Eigen::VectorXd::Constant(data.n_examples(), ybar) -
      data.y.cast<double>();
  return (2.0 / n) * (data.x.transpose() * resid).cwiseAbs().maxCoeff();
}

LassoGlmModel train_lasso_glm(const TrainingSet& data, double lambda,
                              const LassoGlmModel* warm_start) {
  if (data.n_examples() == 0) throw EmptyInput("train_lasso_glm");
  if (!(lambda >= 0.0)) {
    throw Error("lambda must be non-negative, got " + std::to_string(lambda));
  }
  const long n = data.n_examples();
  const long d = data.dim();
  const Eigen::VectorXd y = data.y.cast<double>();
  const double ybar = y.mean();
  if (ybar <= 0.0 || ybar >= 1.0) {
    throw DegenerateClass("need both classes to fit a logistic model");
  }

  // At lambda >= lambda_max the KKT conditions make the intercept-only model
  // optimal outright, with every coefficient exactly zero; return it directly
  // instead of letting rounding in the reweighted solve smear the zeros.
  if (lambda >= lasso_lambda_max(data)) {
    LassoGlmModel flat;
    flat.beta0 = std::log(ybar / (1.0 - ybar));
    flat.beta = Eigen::VectorXd::Zero(d);
    flat.lambda = lambda;
    return flat;
  }

  LassoGlmModel model;
  if (warm_start && warm_start->beta.size() == d) {
    model = *warm_start;
  } else {
    model.beta0 = std::log(ybar / (1.0 - ybar));
    model.beta = Eigen::VectorXd::Zero(d);
  }
  model.lambda = lambda;

  constexpr double kPMin = 1e-5;
  constexpr double kOuterTol = 1e-6;
  constexpr double kInnerTol = 1e-9;
  constexpr int kMaxOuter = 200;
  constexpr int kMaxInner = 10000;
  const double thresh = static_cast<double>(n) * lambda / 2.0;

  Eigen::VectorXd eta = (data.x * model.beta).array() + model.beta0;
  int outer = 0;
  for (; outer < kMaxOuter; ++outer) {
    // Quadratic (working response) approximation at the current fit.
    Eigen::VectorXd w(n), z(n);
    for (long i = 0; i < n; ++i) {
      double p = 1.0 / (1.0 + std::exp(-eta[i]));
      p = std::clamp(p, kPMin, 1.0 - kPMin);
      w[i] = p * (1.0 - p);
      z[i] = eta[i] + (y[i] - p) / w[i];
    }

    const double beta0_before = model.beta0;
    const Eigen::VectorXd beta_before = model.beta;

    // Coordinate descent on the penalized weighted least squares
    //   (1/N) sum w_i (z_i - beta0 - x_i.beta)^2 + lambda |beta|_1.
    Eigen::VectorXd resid = z - (data.x * model.beta).matrix();
    resid.array() -= model.beta0;
    const double w_sum = w.sum();
    Eigen::VectorXd denoms(d);
    for (long j = 0; j < d; ++j) {
      denoms[j] = (w.array() * data.x.col(j).array().square()).sum();
    }
    for (int sweep = 0; sweep < kMaxInner; ++sweep) {
      double max_delta = 0.0;
      for (long j = 0; j < d; ++j) {
        const double denom = denoms[j];
        if (denom == 0.0) continue;
        const double num =
            (w.array() * data.x.col(j).array() * resid.array()).sum() +
            denom * model.beta[j];
        const double bj = soft_threshold(num, thresh) / denom;
        const double delta = bj - model.beta[j];
        if (delta != 0.0) {
          resid -= delta * data.x.col(j);
          model.beta[j] = bj;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      const double d0 = (w.array() * resid.array()).sum() / w_sum;
      if (d0 != 0.0) {
        model.beta0 += d0;
        resid.array() -= d0;
        max_delta = std::max(max_delta, std::abs(d0));
      }
      if (max_delta < kInnerTol) break;
    }

    eta = (data.x * model.beta).array() + model.beta0;
    const double change =
        std::max((model.beta - beta_before).cwiseAbs().maxCoeff(),
                 std::abs(model.beta0 - beta0_before));
    if (change < kOuterTol) break;
  }
  if (outer >= kMaxOuter) throw NonConvergence(outer, "lasso reweighting loop");
  return model;
}

double score_lasso_glm(const LassoGlmModel& model,
                       const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.beta.size()) {
    throw DimensionMismatch(model.beta.size(), x.size());
  }
  return model.beta0 + model.beta.dot(x);
}

double lasso_objective(const TrainingSet& data, const LassoGlmModel& model) {
  return binomial_deviance(data.x, data.y, model.beta0, model.beta) /
             static_cast<double>(data.n_examples()) +
         model.lambda * model.beta.lpNorm<1>();
}

}  // namespace p300
