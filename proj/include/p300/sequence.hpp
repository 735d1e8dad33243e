#pragma once

#include <vector>

#include "p300/dsp.hpp"

namespace p300 {

// One presentation sequence: every stimulus class flashed n_trials times
// while the subject attends target_class. Epochs carry their own
// stimulus_class and trial_index. `id` is the key fold plans hang onto.
struct SequenceRecord {
  std::vector<FeatureVector> epochs;
  int target_class = 0;
  int n_trials = 0;
  int id = 0;
};

// Groups single-paradigm features (group == kNone) by run_id into sequences.
// The target class is read off the epochs flagged as targets, which must all
// agree within a run.
std::vector<SequenceRecord> sequences_from_features(
    const std::vector<FeatureVector>& features);

struct RowColSequences {
  std::vector<SequenceRecord> rows;
  std::vector<SequenceRecord> cols;
};

// Splits speller features (group == kRow / kColumn) by run into a
// row-sequence and a column-sequence per character, each a six-class task.
RowColSequences rowcol_to_sequences(const std::vector<FeatureVector>& features);

// Subsets every epoch of the sequence to the montage channels.
SequenceRecord select_montage(const SequenceRecord& seq,
                              const ElectrodeMontage& montage);

}  // namespace p300
