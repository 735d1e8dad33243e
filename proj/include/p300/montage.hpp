#pragma once

#include <string>
#include <vector>

namespace p300 {

// A named, ordered electrode subset. The three built-in configurations are
// strictly nested: I (4 channels) < II (8) < III (16).
struct ElectrodeMontage {
  std::string name;
  std::vector<std::string> channels;

  int n_channels() const { return static_cast<int>(channels.size()); }
};

const ElectrodeMontage& config_i();
const ElectrodeMontage& config_ii();
const ElectrodeMontage& config_iii();

// Accepts "I", "II", "III" as well as "CONFIG_I" etc., case-insensitively.
const ElectrodeMontage& montage_by_name(const std::string& name);

const std::vector<ElectrodeMontage>& builtin_montages();

}  // namespace p300
