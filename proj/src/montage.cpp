#include "p300/montage.hpp"

#include <algorithm>
#include <cctype>

#include "p300/error.hpp"

namespace p300 {

const ElectrodeMontage& config_i() {
  static const ElectrodeMontage m{"CONFIG_I", {"Fz", "Cz", "Pz", "Oz"}};
  return m;
}

const ElectrodeMontage& config_ii() {
  static const ElectrodeMontage m{
      "CONFIG_II", {"Fz", "Cz", "Pz", "Oz", "P3", "P4", "P7", "P8"}};
  return m;
}

const ElectrodeMontage& config_iii() {
  static const ElectrodeMontage m{
      "CONFIG_III", {"Fz", "Cz", "Pz", "Oz", "P3", "P4", "P7", "P8", "FC1",
                     "FC2", "CP1", "CP2", "C3", "C4", "O1", "O2"}};
  return m;
}

const std::vector<ElectrodeMontage>& builtin_montages() {
  static const std::vector<ElectrodeMontage> all{config_i(), config_ii(),
                                                 config_iii()};
  return all;
}

const ElectrodeMontage& montage_by_name(const std::string& name) {
  std::string key;
  for (char c : name) key.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  if (key.rfind("CONFIG_", 0) == 0) key = key.substr(7);
  if (key == "I" || key == "1" || key == "4") return config_i();
  if (key == "II" || key == "2" || key == "8") return config_ii();
  if (key == "III" || key == "3" || key == "16") return config_iii();
  throw Error("unknown montage '" + name + "' (expected I, II, or III)");
}

}  // namespace p300
