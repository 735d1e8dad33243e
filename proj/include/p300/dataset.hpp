#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "p300/montage.hpp"

namespace p300 {

// Stimulus axis for speller data. Image-recognition data uses kNone; speller
// epochs are split into a column group and a row group, each a six-class
// problem of its own.
enum class StimulusGroup : int { kNone = 0, kColumn = 1, kRow = 2 };

struct StimulusEvent {
  long onset_sample = 0;
  int stimulus_class = 0;  // 0..5 within its group
  bool is_target = false;
  int run_id = 0;
  int sequence_index = 0;  // repetition cycle within the run (trial index)
  StimulusGroup group = StimulusGroup::kNone;
};

// A continuous multichannel recording with its stimulus log. Samples are in
// microvolts, one row per channel.
struct Recording {
  Eigen::MatrixXd samples;  // channels x time
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_labels;
  std::string reference_note;
  std::vector<StimulusEvent> events;

  long n_channels() const { return samples.rows(); }
  long n_samples() const { return samples.cols(); }

  // Checks the type invariants (positive rate, unique labels, events within
  // the recorded span). Throws Error on violation.
  void validate() const;
};

// A fixed-length post-stimulus window, one row per channel.
struct Epoch {
  Eigen::MatrixXd data;  // channels x time
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_labels;
  int stimulus_class = 0;
  bool is_target = false;
  int run_id = 0;
  int trial_index = 0;
  StimulusGroup group = StimulusGroup::kNone;

  long n_channels() const { return data.rows(); }
  long n_samples() const { return data.cols(); }
};

struct EpochExtraction {
  std::vector<Epoch> epochs;
  int n_rejected = 0;  // events whose window ran past the recording end
};

// Cuts one epoch per event: sample 0 is the event's onset sample and the
// window is [onset, onset + window_ms), i.e. round(fs * window_ms / 1000)
// samples. Events whose window does not fit are rejected and counted.
EpochExtraction extract_epochs(const Recording& rec, double window_ms = 1000.0);

// Returns an epoch holding exactly the montage channels in montage order.
// Throws MissingChannel if the epoch lacks one.
Epoch select_montage(const Epoch& epoch, const ElectrodeMontage& montage);

// Channel subset of a whole recording, same semantics as select_montage.
Recording select_channels(const Recording& rec,
                          const std::vector<std::string>& labels);

// Subtracts the per-sample mean of the reference channels from every channel
// (references included) and notes the new reference.
Recording rereference(const Recording& rec,
                      const std::vector<std::string>& reference_channels);

}  // namespace p300
