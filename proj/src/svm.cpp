#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "p300/classifiers.hpp"
#include "p300/error.hpp"

namespace p300 {

namespace {

// Exact minimizer over b of C * sum hinge(y_i (w.x_i + b)) given w. The sum
// is convex piecewise linear in b with breakpoints at y_i - w.x_i; walk the
// sorted breakpoints until the one-sided slope turns non-negative, and take
// the middle of a flat stretch when there is one.
double optimal_bias(const TrainingSet& data, const Eigen::VectorXd& w) {
  const long n = data.n_examples();
  std::vector<std::pair<double, double>> bp(static_cast<std::size_t>(n));
  const Eigen::VectorXd proj = data.x * w;
  double slope = 0.0;
  for (long i = 0; i < n; ++i) {
    const double yi = data.y[i] ? 1.0 : -1.0;
    bp[static_cast<std::size_t>(i)] = {yi - proj[i], yi};
    // Below every breakpoint all positive-class hinges are active and no
    // negative-class ones are, so the initial slope counts only the +1 rows.
    if (yi > 0) slope -= 1.0;
  }
  std::sort(bp.begin(), bp.end());

  double prev = bp.front().first;
  for (const auto& [pos, yi] : bp) {
    if (slope >= 0.0) {
      // slope == 0 means every b in [prev, pos] is optimal.
      return slope == 0.0 ? 0.5 * (prev + pos) : prev;
    }
    prev = pos;
    // Crossing a +1 breakpoint deactivates its hinge (slope += 1); crossing
    // a -1 breakpoint activates one (slope -= -1 = +1). Either way +1.
    slope += 1.0;
  }
  return prev;
}

}  // namespace

LinearSvmModel train_linear_svm(const TrainingSet& data, double c,
                                SvmTrainDiagnostics* diag, double epsilon,
                                long max_iterations) {
  if (data.n_examples() == 0) throw EmptyInput("train_linear_svm");
  if (!(c > 0.0)) throw Error("C must be positive, got " + std::to_string(c));
  const long n = data.n_examples();
  const long d = data.dim();

  Eigen::VectorXd y(n);
  bool has_pos = false, has_neg = false;
  for (long i = 0; i < n; ++i) {
    y[i] = data.y[i] ? 1.0 : -1.0;
    (data.y[i] ? has_pos : has_neg) = true;
  }
  if (!has_pos || !has_neg) {
    throw DegenerateClass("need both classes to fit a separating hyperplane");
  }

  const Eigen::VectorXd sq_norm = data.x.rowwise().squaredNorm();
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(d);

  long iter = 0;
  for (; iter < max_iterations; ++iter) {
    // Gradient of the dual alpha'Q alpha / 2 - e'alpha, via the kept weight
    // vector: grad_i = y_i (w . x_i) - 1.
    const Eigen::VectorXd grad =
        (y.array() * (data.x * w).array() - 1.0).matrix();

    // Most violating pair. up: directions where alpha can grow along +y;
    // low: where it can shrink.
    long i_up = -1, i_low = -1;
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (long t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      const bool can_up = (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
      const bool can_low = (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
      if (can_up && v > m_up) {
        m_up = v;
        i_up = t;
      }
      if (can_low && v < m_low) {
        m_low = v;
        i_low = t;
      }
    }
    if (i_up < 0 || i_low < 0 || m_up - m_low <= epsilon) break;

    const long i = i_up, j = i_low;
    const double kij = data.x.row(i).dot(data.x.row(j));
    const double quad = std::max(sq_norm[i] + sq_norm[j] - 2.0 * kij, 1e-12);
    // Move along alpha_i += y_i t, alpha_j -= y_j t, which keeps y'alpha
    // fixed; the unconstrained optimum then gets clipped to both boxes.
    double t_step = -(y[i] * grad[i] - y[j] * grad[j]) / quad;
    double t_lo, t_hi;
    if (y[i] > 0) {
      t_lo = -alpha[i];
      t_hi = c - alpha[i];
    } else {
      t_lo = alpha[i] - c;
      t_hi = alpha[i];
    }
    if (y[j] > 0) {
      t_lo = std::max(t_lo, alpha[j] - c);
      t_hi = std::min(t_hi, alpha[j]);
    } else {
      t_lo = std::max(t_lo, -alpha[j]);
      t_hi = std::min(t_hi, c - alpha[j]);
    }
    t_step = std::clamp(t_step, t_lo, t_hi);

    const double da_i = y[i] * t_step;
    const double da_j = -y[j] * t_step;
    alpha[i] += da_i;
    alpha[j] += da_j;
    w.noalias() += (da_i * y[i]) * data.x.row(i).transpose();
    w.noalias() += (da_j * y[j]) * data.x.row(j).transpose();

    if (diag) {
      diag->dual_objective_trace.push_back(0.5 * w.squaredNorm() - alpha.sum());
    }
  }
  if (iter >= max_iterations) throw NonConvergence(iter, "linear SVM solver");

  LinearSvmModel model;
  model.w = w;
  model.c = c;
  model.b = optimal_bias(data, w);
  if (diag) {
    diag->iterations = iter;
    const Eigen::VectorXd grad =
        (y.array() * (data.x * w).array() - 1.0).matrix();
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    for (long t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if ((y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0)) {
        m_up = std::max(m_up, v);
      }
      if ((y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c)) {
        m_low = std::min(m_low, v);
      }
    }
    diag->kkt_gap = m_up - m_low;
  }
  return model;
}

double score_linear_svm(const LinearSvmModel& model,
                        const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != model.w.size()) {
    throw DimensionMismatch(model.w.size(), x.size());
  }
  return model.w.dot(x) + model.b;
}

double svm_primal_objective(const LinearSvmModel& model,
                            const TrainingSet& data) {
  double hinge = 0.0;
  for (long i = 0; i < data.n_examples(); ++i) {
    const double yi = data.y[i] ? 1.0 : -1.0;
    hinge += std::max(0.0, 1.0 - yi * (model.w.dot(data.x.row(i)) + model.b));
  }
  return 0.5 * model.w.squaredNorm() + model.c * hinge;
}

}  // namespace p300
