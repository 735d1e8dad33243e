#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "p300/error.hpp"
#include "p300/evaluation.hpp"
#include "p300/rng.hpp"
#include "p300/synth.hpp"

namespace p300 {

ChannelGainMap ChannelGainMap::defaults() {
  ChannelGainMap map;
  map.gains = {{"Fz", 0.35}, {"Cz", 0.7}, {"Pz", 1.0}, {"Oz", 0.3}};
  return map;
}

double ChannelGainMap::gain(const std::string& label) const {
  const auto it = gains.find(label);
  return it == gains.end() ? 0.5 : it->second;
}

void ChannelGainMap::validate() const {
  for (const auto& [label, g] : gains) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw Error("gain for " + label + " outside [0, 1]");
    }
  }
  const double fz = gain("Fz"), cz = gain("Cz"), pz = gain("Pz");
  if (pz != 1.0) throw Error("Pz gain must be 1.0");
  for (const auto& [label, g] : gains) {
    if (g > pz) throw Error("gain for " + label + " exceeds Pz");
  }
  if (!(fz < cz && cz < pz)) {
    throw Error("gains must increase strictly Fz < Cz < Pz");
  }
}

void SynthSpec::validate() const {
  if (n_sequences < 1) throw Error("n_sequences must be >= 1");
  if (n_trials < 1) throw Error("n_trials must be >= 1");
  if (!(sample_rate_hz > 0.0)) throw Error("sample rate must be positive");
  if (!(p300_amplitude_uv >= 0.0)) throw Error("amplitude must be >= 0");
  if (!(noise_std_uv >= 0.0)) throw Error("noise std must be >= 0");
  if (!(latency_ms > 0.0 && latency_ms < 1000.0)) {
    throw Error("latency must lie inside the 1000 ms epoch");
  }
  if (montage.channels.empty()) throw Error("montage has no channels");
}

SynthSession generate_session(const SynthSpec& spec,
                              const ChannelGainMap& gains) {
  spec.validate();
  gains.validate();

  const int n_ch = spec.montage.n_channels();
  const long n_time = std::lround(spec.sample_rate_hz);
  constexpr double kTemplateWidthMs = 300.0;

  Eigen::VectorXd shape = Eigen::VectorXd::Zero(n_time);
  const double t0 = spec.latency_ms - kTemplateWidthMs / 2.0;
  for (long s = 0; s < n_time; ++s) {
    const double t_ms = 1000.0 * static_cast<double>(s) / spec.sample_rate_hz;
    if (t_ms >= t0 && t_ms <= t0 + kTemplateWidthMs) {
      shape[s] = std::sin(std::numbers::pi * (t_ms - t0) / kTemplateWidthMs);
    }
  }

  SynthSession session;
  session.spec = spec;
  session.epochs.reserve(static_cast<std::size_t>(spec.n_sequences) *
                         static_cast<std::size_t>(spec.n_trials) * 6);

  for (int s = 0; s < spec.n_sequences; ++s) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(s)));
    const int target = static_cast<int>(rng.below(6));
    session.target_classes.push_back(target);

    for (int t = 0; t < spec.n_trials; ++t) {
      for (int c = 0; c < 6; ++c) {
        Epoch ep;
        ep.sample_rate_hz = spec.sample_rate_hz;
        ep.channel_labels = spec.montage.channels;
        ep.stimulus_class = c;
        ep.is_target = (c == target);
        ep.run_id = s;
        ep.trial_index = t;
        ep.group = StimulusGroup::kNone;
        ep.data.resize(n_ch, n_time);
        for (int ch = 0; ch < n_ch; ++ch) {
          for (long i = 0; i < n_time; ++i) {
            ep.data(ch, i) = spec.noise_std_uv * rng.normal();
          }
          if (ep.is_target) {
            ep.data.row(ch) += (spec.p300_amplitude_uv *
                                gains.gain(spec.montage.channels[ch])) *
                               shape.transpose();
          }
        }
        session.epochs.push_back(std::move(ep));
      }
    }
  }
  return session;
}

std::vector<SequenceRecord> session_to_sequences(const SynthSession& session) {
  std::vector<FeatureVector> features;
  features.reserve(session.epochs.size());
  for (const Epoch& ep : session.epochs) {
    features.push_back(preprocess_epoch(ep, session.spec.montage));
  }
  return sequences_from_features(features);
}

double calibrate_snr(double target_accuracy, ClassifierFamily family,
                     const ElectrodeMontage& montage,
                     const CalibrationSettings& settings) {
  if (!(target_accuracy > 1.0 / 6.0 && target_accuracy < 1.0)) {
    throw Error("target accuracy must lie strictly between 1/6 and 1");
  }

  const auto evaluate = [&](double amplitude) {
    SynthSpec spec;
    spec.n_sequences = settings.n_sequences;
    spec.n_trials = settings.n_trials;
    spec.montage = montage;
    spec.sample_rate_hz = settings.sample_rate_hz;
    spec.p300_amplitude_uv = amplitude;
    spec.noise_std_uv = settings.noise_std_uv;
    spec.seed = settings.generator_seed;
    const std::vector<SequenceRecord> seqs =
        session_to_sequences(generate_session(spec));
    return cross_validated_accuracy(seqs, family, montage, settings.n_trials,
                                    settings.k, settings.seed)
        .accuracy;
  };

  // Bracket the target from below, doubling the upper probe until it clears
  // the target or hits the cap.
  double lo = 0.0;
  double hi = 1.0;
  double acc_hi = evaluate(hi);
  while (acc_hi < target_accuracy && hi < settings.amplitude_cap) {
    hi = std::min(2.0 * hi, settings.amplitude_cap);
    acc_hi = evaluate(hi);
  }
  if (acc_hi < target_accuracy) {
    throw NonMonotoneEstimate(
        "accuracy " + std::to_string(acc_hi) + " at the amplitude cap " +
        std::to_string(settings.amplitude_cap) + " still below target " +
        std::to_string(target_accuracy));
  }

  for (int it = 0; it < settings.max_bisections; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double acc = evaluate(mid);
    if (std::abs(acc - target_accuracy) <= settings.tolerance) return mid;
    (acc < target_accuracy ? lo : hi) = mid;
  }
  throw NonMonotoneEstimate(
      "bisection failed to land within ±" + std::to_string(settings.tolerance) +
      " of " + std::to_string(target_accuracy) + " in " +
      std::to_string(settings.max_bisections) + " steps");
}

CalibrationFixture read_calibration_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open calibration fixture " + path);
  CalibrationFixture fixture;
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("empty calibration fixture " + path);
  }
  std::istringstream head(line);
  std::string tag;
  head >> tag >> fixture.generator_version;
  if (tag != "generator") {
    throw IoError("calibration fixture " + path + " missing generator line");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string family, montage;
    double amplitude;
    if (!(row >> family >> montage >> amplitude)) {
      throw IoError("bad calibration fixture line: " + line);
    }
    fixture.amplitudes[{family, montage}] = amplitude;
  }
  return fixture;
}

void write_calibration_fixture(const std::string& path,
                               const CalibrationFixture& fixture) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write calibration fixture " + path);
  out << "generator " << fixture.generator_version << "\n";
  out.precision(17);
  for (const auto& [key, amplitude] : fixture.amplitudes) {
    out << key.first << " " << key.second << " " << amplitude << "\n";
  }
  if (!out) throw IoError("failed writing calibration fixture " + path);
}

int brute_force_sequence_decision(
    const std::vector<std::vector<double>>& scores_by_class, int n_trials) {
  if (scores_by_class.size() != 6) {
    throw Error("score table must have exactly 6 classes, got " +
                std::to_string(scores_by_class.size()));
  }
  if (n_trials < 1) {
    throw Error("n_trials must be >= 1, got " + std::to_string(n_trials));
  }
  int best_class = 0;
  double best_mean = 0.0;
  bool first = true;
  for (int c = 0; c < 6; ++c) {
    const std::vector<double>& row = scores_by_class[static_cast<std::size_t>(c)];
    if (static_cast<int>(row.size()) < n_trials) {
      throw IncompleteSequence("class " + std::to_string(c) + " has " +
                               std::to_string(row.size()) + " scores, need " +
                               std::to_string(n_trials));
    }
    double sum = 0.0;
    for (int t = 0; t < n_trials; ++t) sum = sum + row[static_cast<std::size_t>(t)];
    const double mean = sum / n_trials;
    if (first || mean > best_mean) {
      best_mean = mean;
      best_class = c;
      first = false;
    }
  }
  return best_class;
}

}  // namespace p300
