#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "p300/classifiers.hpp"
#include "p300/dataset.hpp"
#include "p300/montage.hpp"
#include "p300/sequence.hpp"

namespace p300 {

// Scalp weighting of the synthetic P300 deflection. Labels not in the map
// fall back to 0.5. The canonical gradient holds: largest at Pz, smallest
// at Fz, Cz in between.
struct ChannelGainMap {
  std::map<std::string, double> gains;

  static ChannelGainMap defaults();
  double gain(const std::string& label) const;
  void validate() const;
};

struct SynthSpec {
  int n_sequences = 0;
  int n_trials = 0;
  ElectrodeMontage montage;
  double sample_rate_hz = 128.0;
  double p300_amplitude_uv = 1.0;
  double noise_std_uv = 1.0;
  double latency_ms = 300.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthSession {
  std::vector<Epoch> epochs;
  std::vector<int> target_classes;  // ground truth, one per sequence
  SynthSpec spec;
};

// Simulated session: per sequence a uniformly random target class; target
// epochs carry a 300 ms half-sine deflection centered at latency_ms, scaled
// per channel by the gain map; white Gaussian noise everywhere. Each
// sequence draws from its own seed stream, so contents do not depend on
// generation order.
SynthSession generate_session(const SynthSpec& spec,
                              const ChannelGainMap& gains =
                                  ChannelGainMap::defaults());

// Runs the standard pipeline over the session's raw epochs and groups the
// features into per-sequence records.
std::vector<SequenceRecord> session_to_sequences(const SynthSession& session);

struct CalibrationSettings {
  int n_sequences = 200;
  int n_trials = 5;
  double noise_std_uv = 1.0;
  double sample_rate_hz = 128.0;
  std::uint64_t seed = 0x5eed,
                 generator_seed = 0xacc01ade;
  int k = 10;
  double tolerance = 0.03;
  double amplitude_cap = 8.0;
  int max_bisections = 25;
};

// Bisects the template amplitude until 10-fold, n_trials-trial CV accuracy
// lands within tolerance of the target. Every probe reuses the same seeds
// (common random numbers), keeping the accuracy-vs-amplitude curve monotone
// enough to bracket.
double calibrate_snr(double target_accuracy, ClassifierFamily family,
                     const ElectrodeMontage& montage,
                     const CalibrationSettings& settings = {});

// Calibrated amplitudes keyed by (family, montage), stamped with the
// generator version so stale fixtures are rejected.
inline constexpr const char* kGeneratorVersion = "p300synth-1";

struct CalibrationFixture {
  std::string generator_version = kGeneratorVersion;
  std::map<std::pair<std::string, std::string>, double> amplitudes;
};

CalibrationFixture read_calibration_fixture(const std::string& path);
void write_calibration_fixture(const std::string& path,
                               const CalibrationFixture& fixture);

// Oracle twin of score_sequence: plain loops over a per-class score table,
// scores_by_class[c][t] being class c's score at trial t.
int brute_force_sequence_decision(
    const std::vector<std::vector<double>>& scores_by_class, int n_trials);

}  // namespace p300
