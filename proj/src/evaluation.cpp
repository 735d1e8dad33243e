#include <algorithm>
#include <numeric>
#include <set>

#include "p300/error.hpp"
#include "p300/evaluation.hpp"
#include "p300/rng.hpp"

namespace p300 {

namespace {

// Argmax of per-class mean scores over the first n_trials epochs of each
// class, epochs ordered by trial_index. Ties go to the lowest class.
int decide_from_scores(const SequenceRecord& seq,
                       const std::vector<double>& epoch_scores, int n_trials) {
  if (n_trials < 1) {
    throw Error("n_trials must be >= 1, got " + std::to_string(n_trials));
  }
  double best = 0.0;
  int best_class = -1;
  for (int c = 0; c < 6; ++c) {
    std::vector<std::pair<int, std::size_t>> order;
    for (std::size_t e = 0; e < seq.epochs.size(); ++e) {
      if (seq.epochs[e].stimulus_class == c) {
        order.emplace_back(seq.epochs[e].trial_index, e);
      }
    }
    if (static_cast<int>(order.size()) < n_trials) {
      throw IncompleteSequence("class " + std::to_string(c) + " has " +
                               std::to_string(order.size()) +
                               " epochs, need " + std::to_string(n_trials));
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) {
                       return a.first < b.first;
                     });
    double mean = 0.0;
    for (int t = 0; t < n_trials; ++t) {
      mean += epoch_scores[order[static_cast<std::size_t>(t)].second];
    }
    mean /= static_cast<double>(n_trials);
    if (best_class < 0 || mean > best) {
      best = mean;
      best_class = c;
    }
  }
  return best_class;
}

struct SweepOutcome {
  std::vector<double> pooled;                 // one per trial count
  std::vector<std::vector<double>> per_fold;  // [trial count][fold]
};

// Shared engine: one training per fold, every requested trial count scored
// against it.
SweepOutcome run_folds(const std::vector<SequenceRecord>& sequences,
                       ClassifierFamily family,
                       const ElectrodeMontage& montage,
                       const std::vector<int>& trial_list, int k,
                       std::uint64_t seed, double hyper) {
  const FoldPlan plan = plan_folds(sequences, k, seed);

  std::vector<SequenceRecord> selected;
  selected.reserve(sequences.size());
  for (const SequenceRecord& seq : sequences) {
    selected.push_back(select_montage(seq, montage));
  }

  const std::size_t nt = trial_list.size();
  std::vector<long> correct(nt, 0);
  SweepOutcome out;
  out.per_fold.assign(nt, {});

  for (int f = 0; f < k; ++f) {
    std::vector<FeatureVector> train_feats;
    std::vector<const SequenceRecord*> held_out;
    for (const SequenceRecord& seq : selected) {
      if (plan.assignment.at(seq.id) == f) {
        held_out.push_back(&seq);
      } else {
        train_feats.insert(train_feats.end(), seq.epochs.begin(),
                           seq.epochs.end());
      }
    }
    const TrainedClassifier clf =
        train(family, TrainingSet::from_features(train_feats), hyper);

    std::vector<long> fold_correct(nt, 0);
    for (const SequenceRecord* seq : held_out) {
      std::vector<double> scores(seq->epochs.size());
      for (std::size_t e = 0; e < seq->epochs.size(); ++e) {
        scores[e] = clf.score(seq->epochs[e].values);
      }
      for (std::size_t t = 0; t < nt; ++t) {
        if (decide_from_scores(*seq, scores, trial_list[t]) ==
            seq->target_class) {
          fold_correct[t]++;
          correct[t]++;
        }
      }
    }
    for (std::size_t t = 0; t < nt; ++t) {
      out.per_fold[t].push_back(
          held_out.empty() ? 0.0
                           : static_cast<double>(fold_correct[t]) /
                                 static_cast<double>(held_out.size()));
    }
  }

  out.pooled.resize(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    out.pooled[t] = static_cast<double>(correct[t]) /
                    static_cast<double>(sequences.size());
  }
  return out;
}

}  // namespace

FoldPlan plan_folds(const std::vector<SequenceRecord>& sequences, int k,
                    std::uint64_t seed) {
  if (k < 2) throw Error("fold count must be >= 2, got " + std::to_string(k));
  const long n = static_cast<long>(sequences.size());
  if (n < k) throw TooFewSequences(n, k);

  std::set<int> ids;
  for (const SequenceRecord& seq : sequences) {
    if (!ids.insert(seq.id).second) {
      throw Error("duplicate sequence id " + std::to_string(seq.id));
    }
  }

  std::vector<long> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0L);
  Rng rng(seed);
  rng.shuffle(order);

  FoldPlan plan;
  plan.k = k;
  for (long p = 0; p < n; ++p) {
    plan.assignment[sequences[static_cast<std::size_t>(order[p])].id] =
        static_cast<int>(p % k);
  }
  return plan;
}

int score_sequence(const TrainedClassifier& clf, const SequenceRecord& seq,
                   int n_trials) {
  std::vector<double> scores(seq.epochs.size());
  for (std::size_t e = 0; e < seq.epochs.size(); ++e) {
    scores[e] = clf.score(seq.epochs[e].values);
  }
  return decide_from_scores(seq, scores, n_trials);
}

CvResult cross_validated_accuracy(const std::vector<SequenceRecord>& sequences,
                                  ClassifierFamily family,
                                  const ElectrodeMontage& montage,
                                  int n_trials, int k, std::uint64_t seed,
                                  double hyper) {
  const SweepOutcome outcome =
      run_folds(sequences, family, montage, {n_trials}, k, seed, hyper);
  CvResult result;
  result.accuracy = outcome.pooled[0];
  result.per_fold = outcome.per_fold[0];
  return result;
}

AccuracyCurve sweep_trials(const std::vector<SequenceRecord>& sequences,
                           ClassifierFamily family,
                           const ElectrodeMontage& montage,
                           const std::vector<int>& trial_list, int k,
                           std::uint64_t seed, const std::string& dataset_tag,
                           double hyper) {
  if (trial_list.empty()) throw EmptyRequest("sweep_trials");
  for (std::size_t i = 1; i < trial_list.size(); ++i) {
    if (trial_list[i] <= trial_list[i - 1]) {
      throw Error("trial counts must be strictly increasing");
    }
  }
  const SweepOutcome outcome =
      run_folds(sequences, family, montage, trial_list, k, seed, hyper);

  AccuracyCurve curve;
  curve.family = family;
  curve.montage_name = montage.name;
  curve.dataset_tag = dataset_tag;
  for (std::size_t t = 0; t < trial_list.size(); ++t) {
    curve.points.push_back({trial_list[t], outcome.pooled[t],
                            static_cast<int>(sequences.size())});
  }
  return curve;
}

ComparisonTable sweep_montages(const std::vector<SequenceRecord>& sequences,
                               ClassifierFamily family,
                               const std::vector<ElectrodeMontage>& montages,
                               int n_trials, int k, std::uint64_t seed,
                               const std::string& dataset_tag, double hyper) {
  if (montages.empty()) throw EmptyRequest("sweep_montages");
  ComparisonTable table;
  table.column_labels = {dataset_tag};
  table.cells.resize(static_cast<long>(montages.size()), 1);
  for (std::size_t m = 0; m < montages.size(); ++m) {
    table.row_labels.push_back(montages[m].name);
    const SweepOutcome outcome =
        run_folds(sequences, family, montages[m], {n_trials}, k, seed, hyper);
    table.cells(static_cast<long>(m), 0) = 100.0 * outcome.pooled[0];
  }
  return table;
}

}  // namespace p300
