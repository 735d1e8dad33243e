#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "p300/classifiers.hpp"
#include "p300/sequence.hpp"

namespace p300 {

struct FoldPlan {
  int k = 0;
  std::map<int, int> assignment;  // sequence id -> fold index
};

struct CvResult {
  double accuracy = 0.0;           // pooled over all held-out sequences
  std::vector<double> per_fold;
};

struct AccuracyCurve {
  struct Point {
    int n_trials = 0;
    double accuracy = 0.0;
    int n_sequences = 0;
  };
  std::vector<Point> points;
  ClassifierFamily family = ClassifierFamily::kBayesLda;
  std::string montage_name;
  std::string dataset_tag;
};

struct ComparisonTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;  // dataset tags
  Eigen::MatrixXd cells;                   // accuracy percents
};

// Deterministic shuffled partition at sequence granularity; fold sizes
// differ by at most one.
FoldPlan plan_folds(const std::vector<SequenceRecord>& sequences, int k,
                    std::uint64_t seed);

// Averages the classifier score of each class's first n_trials epochs (by
// trial_index) and returns the argmax class, lowest index on ties.
int score_sequence(const TrainedClassifier& clf, const SequenceRecord& seq,
                   int n_trials);

// k-fold protocol: per fold, train binary P300/non-P300 on all out-of-fold
// epochs, then predict each held-out sequence. `hyper` is forwarded to
// train(); NaN keeps the family defaults.
CvResult cross_validated_accuracy(
    const std::vector<SequenceRecord>& sequences, ClassifierFamily family,
    const ElectrodeMontage& montage, int n_trials, int k, std::uint64_t seed,
    double hyper = std::numeric_limits<double>::quiet_NaN());

// One cross-validated point per requested trial count. Classifiers are
// trained once per fold and reused across the whole trial axis.
AccuracyCurve sweep_trials(
    const std::vector<SequenceRecord>& sequences, ClassifierFamily family,
    const ElectrodeMontage& montage, const std::vector<int>& trial_list,
    int k, std::uint64_t seed, const std::string& dataset_tag = "synthetic",
    double hyper = std::numeric_limits<double>::quiet_NaN());

// One cross-validated accuracy per montage, as a single-column table.
ComparisonTable sweep_montages(
    const std::vector<SequenceRecord>& sequences, ClassifierFamily family,
    const std::vector<ElectrodeMontage>& montages, int n_trials, int k,
    std::uint64_t seed, const std::string& dataset_tag = "synthetic",
    double hyper = std::numeric_limits<double>::quiet_NaN());

}  // namespace p300
