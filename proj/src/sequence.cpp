#include <algorithm>
#include <map>

#include "p300/error.hpp"
#include "p300/sequence.hpp"

namespace p300 {

namespace {

int target_of(const std::vector<FeatureVector>& epochs,
              const std::string& context) {
  int target = -1;
  for (const FeatureVector& fv : epochs) {
    if (!fv.label) continue;
    if (target >= 0 && target != fv.stimulus_class) {
      throw MalformedSpellerBlock(context + ": conflicting target classes " +
                                  std::to_string(target) + " and " +
                                  std::to_string(fv.stimulus_class));
    }
    target = fv.stimulus_class;
  }
  if (target < 0) {
    throw MalformedSpellerBlock(context + ": no epoch is flagged as target");
  }
  return target;
}

int trials_of(const std::vector<FeatureVector>& epochs) {
  int counts[6] = {0, 0, 0, 0, 0, 0};
  for (const FeatureVector& fv : epochs) {
    if (fv.stimulus_class < 0 || fv.stimulus_class > 5) {
      throw Error("stimulus class " + std::to_string(fv.stimulus_class) +
                  " outside 0..5");
    }
    counts[fv.stimulus_class]++;
  }
  return *std::max_element(counts, counts + 6);
}

}  // namespace

std::vector<SequenceRecord> sequences_from_features(
    const std::vector<FeatureVector>& features) {
  if (features.empty()) throw EmptyInput("sequences_from_features");
  std::map<int, std::vector<FeatureVector>> by_run;
  for (const FeatureVector& fv : features) by_run[fv.run_id].push_back(fv);

  std::vector<SequenceRecord> out;
  int next_id = 0;
  for (auto& [run, epochs] : by_run) {
    SequenceRecord seq;
    seq.id = next_id++;
    seq.target_class = target_of(epochs, "run " + std::to_string(run));
    seq.n_trials = trials_of(epochs);
    seq.epochs = std::move(epochs);
    out.push_back(std::move(seq));
  }
  return out;
}

RowColSequences rowcol_to_sequences(
    const std::vector<FeatureVector>& features) {
  if (features.empty()) throw EmptyInput("rowcol_to_sequences");
  std::map<int, std::vector<FeatureVector>> by_run;
  for (const FeatureVector& fv : features) by_run[fv.run_id].push_back(fv);

  RowColSequences out;
  int next_id = 0;
  for (auto& [run, epochs] : by_run) {
    const std::string context = "character block " + std::to_string(run);
    std::vector<FeatureVector> rows, cols;
    for (FeatureVector& fv : epochs) {
      switch (fv.group) {
        case StimulusGroup::kRow:
          rows.push_back(std::move(fv));
          break;
        case StimulusGroup::kColumn:
          cols.push_back(std::move(fv));
          break;
        case StimulusGroup::kNone:
          throw MalformedSpellerBlock(context +
                                      ": epoch without a row/column group");
      }
    }
    // Every block needs all six rows and all six columns represented.
    for (const auto* half : {&rows, &cols}) {
      bool present[6] = {false, false, false, false, false, false};
      for (const FeatureVector& fv : *half) {
        if (fv.stimulus_class < 0 || fv.stimulus_class > 5) {
          throw MalformedSpellerBlock(context + ": stimulus class " +
                                      std::to_string(fv.stimulus_class) +
                                      " outside 0..5");
        }
        present[fv.stimulus_class] = true;
      }
      const long n_present = std::count(present, present + 6, true);
      if (n_present != 6) {
        throw MalformedSpellerBlock(
            context + ": expected 12 stimulus classes (6 rows + 6 columns), " +
            (half == &rows ? "rows" : "columns") + " cover only " +
            std::to_string(n_present));
      }
    }

    SequenceRecord row_seq;
    row_seq.id = next_id++;
    row_seq.target_class = target_of(rows, context + " rows");
    row_seq.n_trials = trials_of(rows);
    row_seq.epochs = std::move(rows);
    out.rows.push_back(std::move(row_seq));

    SequenceRecord col_seq;
    col_seq.id = next_id++;
    col_seq.target_class = target_of(cols, context + " columns");
    col_seq.n_trials = trials_of(cols);
    col_seq.epochs = std::move(cols);
    out.cols.push_back(std::move(col_seq));
  }
  return out;
}

SequenceRecord select_montage(const SequenceRecord& seq,
                              const ElectrodeMontage& montage) {
  SequenceRecord out;
  out.target_class = seq.target_class;
  out.n_trials = seq.n_trials;
  out.id = seq.id;
  out.epochs.reserve(seq.epochs.size());
  for (const FeatureVector& fv : seq.epochs) {
    out.epochs.push_back(select_montage(fv, montage));
  }
  return out;
}

}  // namespace p300
