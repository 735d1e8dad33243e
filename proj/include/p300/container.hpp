#pragma once

#include <string>
#include <vector>

#include "p300/dataset.hpp"
#include "p300/dsp.hpp"

namespace p300 {

// On-disk epoch set: a text header followed by raw little-endian 64-bit
// float samples, epoch-major, then channel-major, then time.
//
//   p300epochs 1
//   kind raw|features
//   sample_rate_hz <rate>
//   time_samples <t>
//   channels <c> <label> ...
//   epochs <e>
//   speller <0|1>
//   epoch <stimulus_class> <is_target> <run_id> <trial_index> <group>  (x e)
//   payload
//   <e*c*t little-endian float64>
struct EpochSet {
  double sample_rate_hz = 0.0;
  std::vector<std::string> channel_labels;
  bool speller = false;
  bool features = false;  // true once the preprocessing pipeline has run
  std::vector<Epoch> epochs;
};

EpochSet read_container(const std::string& path);
void write_container(const EpochSet& epochs, const std::string& path);

// Conversions between the two epoch shapes a container can hold.
EpochSet epoch_set_from_features(const std::vector<FeatureVector>& features,
                                 bool speller);
std::vector<FeatureVector> features_from_epoch_set(const EpochSet& set);

}  // namespace p300
