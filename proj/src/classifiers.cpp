#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "p300/classifiers.hpp"
#include "p300/error.hpp"

namespace p300 {

namespace {

constexpr int kCvFolds = 5;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

TrainingSet subset(const TrainingSet& data, const std::vector<long>& rows) {
  TrainingSet out;
  out.x.resize(static_cast<long>(rows.size()), data.dim());
  out.y.resize(static_cast<long>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.x.row(static_cast<long>(i)) = data.x.row(rows[i]);
    out.y[static_cast<long>(i)] = data.y[rows[i]];
  }
  out.class_priors = data.class_priors;
  return out;
}

// Stratified fold assignment: the c-th example of each class lands in fold
// c mod k, so every training split keeps both classes as long as each class
// has at least two examples.
std::vector<int> assign_folds(const TrainingSet& data) {
  std::vector<int> fold(static_cast<std::size_t>(data.n_examples()));
  long seen[2] = {0, 0};
  for (long i = 0; i < data.n_examples(); ++i) {
    long& c = seen[data.y[i] ? 1 : 0];
    fold[static_cast<std::size_t>(i)] = static_cast<int>(c % kCvFolds);
    ++c;
  }
  return fold;
}

template <typename TrainFn, typename ScoreFn>
double cv_accuracy(const TrainingSet& data, const std::vector<int>& fold,
                   const TrainFn& fit, const ScoreFn& score) {
  double correct = 0.0;
  long total = 0;
  for (int f = 0; f < kCvFolds; ++f) {
    std::vector<long> train_rows, val_rows;
    for (long i = 0; i < data.n_examples(); ++i) {
      (fold[static_cast<std::size_t>(i)] == f ? val_rows : train_rows)
          .push_back(i);
    }
    if (val_rows.empty()) continue;
    const auto model = fit(subset(data, train_rows));
    for (long i : val_rows) {
      const int pred = score(model, data.x.row(i).transpose()) > 0.0 ? 1 : 0;
      if (pred == data.y[i]) correct += 1.0;
    }
    total += static_cast<long>(val_rows.size());
  }
  return total > 0 ? correct / static_cast<double>(total) : 0.0;
}

double select_svm_c(const TrainingSet& data) {
  const std::vector<int> fold = assign_folds(data);
  const double grid[] = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0};
  double best_c = grid[0];
  double best_acc = -1.0;
  for (double c : grid) {
    const double acc = cv_accuracy(
        data, fold,
        [c](const TrainingSet& t) { return train_linear_svm(t, c); },
        [](const LinearSvmModel& m, const Eigen::VectorXd& x) {
          return score_linear_svm(m, x);
        });
    if (acc > best_acc) {
      best_acc = acc;
      best_c = c;
    }
  }
  return best_c;
}

double select_lasso_lambda(const TrainingSet& data) {
  const double lmax = lasso_lambda_max(data);
  if (lmax <= 0.0) return 0.0;
  constexpr int kPathPoints = 20;
  std::vector<double> path(kPathPoints);
  for (int i = 0; i < kPathPoints; ++i) {
    path[static_cast<std::size_t>(i)] =
        lmax * std::pow(1e-3, static_cast<double>(i) / (kPathPoints - 1));
  }

  const std::vector<int> fold = assign_folds(data);
  std::vector<double> acc(kPathPoints, 0.0);
  std::vector<long> totals(kPathPoints, 0);
  for (int f = 0; f < kCvFolds; ++f) {
    std::vector<long> train_rows, val_rows;
    for (long i = 0; i < data.n_examples(); ++i) {
      (fold[static_cast<std::size_t>(i)] == f ? val_rows : train_rows)
          .push_back(i);
    }
    if (val_rows.empty()) continue;
    const TrainingSet train_set = subset(data, train_rows);
    LassoGlmModel warm;
    for (int p = 0; p < kPathPoints; ++p) {
      warm = train_lasso_glm(train_set, path[static_cast<std::size_t>(p)],
                             p == 0 ? nullptr : &warm);
      for (long i : val_rows) {
        const int pred =
            score_lasso_glm(warm, data.x.row(i).transpose()) > 0.0 ? 1 : 0;
        if (pred == data.y[i]) acc[static_cast<std::size_t>(p)] += 1.0;
      }
      totals[static_cast<std::size_t>(p)] +=
          static_cast<long>(val_rows.size());
    }
  }
  // Walk from the sparse end so ties resolve to the larger lambda.
  int best = 0;
  double best_acc = -1.0;
  for (int p = 0; p < kPathPoints; ++p) {
    const double a = totals[static_cast<std::size_t>(p)] > 0
                         ? acc[static_cast<std::size_t>(p)] /
                               static_cast<double>(
                                   totals[static_cast<std::size_t>(p)])
                         : 0.0;
    if (a > best_acc) {
      best_acc = a;
      best = p;
    }
  }
  return path[static_cast<std::size_t>(best)];
}

}  // namespace

TrainingSet TrainingSet::from_features(
    const std::vector<FeatureVector>& features) {
  if (features.empty()) throw EmptyInput("TrainingSet::from_features");
  const long d = features.front().values.size();
  TrainingSet out;
  out.x.resize(static_cast<long>(features.size()), d);
  out.y.resize(static_cast<long>(features.size()));
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].values.size() != d) {
      throw DimensionMismatch(d, features[i].values.size());
    }
    out.x.row(static_cast<long>(i)) = features[i].values.transpose();
    out.y[static_cast<long>(i)] = features[i].label ? 1 : 0;
  }
  return out;
}

ClassifierFamily family_from_name(const std::string& name) {
  const std::string s = lower(name);
  if (s == "bayes_lda" || s == "lda" || s == "bayeslda") {
    return ClassifierFamily::kBayesLda;
  }
  if (s == "svm" || s == "linear_svm") return ClassifierFamily::kLinearSvm;
  if (s == "lasso_glm" || s == "lasso" || s == "glm") {
    return ClassifierFamily::kLassoGlm;
  }
  throw UnknownFamily(name);
}

std::string family_name(ClassifierFamily family) {
  switch (family) {
    case ClassifierFamily::kBayesLda:
      return "BAYES_LDA";
    case ClassifierFamily::kLinearSvm:
      return "SVM";
    case ClassifierFamily::kLassoGlm:
      return "LASSO_GLM";
  }
  throw UnknownFamily("unrecognized family tag");
}

double TrainedClassifier::score(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  switch (family) {
    case ClassifierFamily::kBayesLda:
      return score_bayes_lda(std::get<BayesLdaModel>(model), x);
    case ClassifierFamily::kLinearSvm:
      return score_linear_svm(std::get<LinearSvmModel>(model), x);
    case ClassifierFamily::kLassoGlm:
      return score_lasso_glm(std::get<LassoGlmModel>(model), x);
  }
  throw UnknownFamily("unrecognized family tag");
}

long TrainedClassifier::dim() const {
  switch (family) {
    case ClassifierFamily::kBayesLda:
      return std::get<BayesLdaModel>(model).weight.size();
    case ClassifierFamily::kLinearSvm:
      return std::get<LinearSvmModel>(model).w.size();
    case ClassifierFamily::kLassoGlm:
      return std::get<LassoGlmModel>(model).beta.size();
  }
  throw UnknownFamily("unrecognized family tag");
}

TrainedClassifier train(ClassifierFamily family, const TrainingSet& data,
                        double hyper) {
  const bool has_hyper = std::isfinite(hyper);
  TrainedClassifier out;
  out.family = family;
  switch (family) {
    case ClassifierFamily::kBayesLda:
      out.model = train_bayes_lda(data, has_hyper ? hyper : 0.1);
      return out;
    case ClassifierFamily::kLinearSvm:
      out.model =
          train_linear_svm(data, has_hyper ? hyper : select_svm_c(data));
      return out;
    case ClassifierFamily::kLassoGlm:
      out.model = train_lasso_glm(
          data, has_hyper ? hyper : select_lasso_lambda(data));
      return out;
  }
  throw UnknownFamily("unrecognized family tag");
}

}  // namespace p300
