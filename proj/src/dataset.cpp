#include "p300/dataset.hpp"

#include <cmath>
#include <set>
#include <sstream>

#include "p300/error.hpp"

namespace p300 {

namespace {

long index_of_channel(const std::vector<std::string>& labels,
                      const std::string& wanted) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == wanted) return static_cast<long>(i);
  }
  throw MissingChannel(wanted);
}

}  // namespace

void Recording::validate() const {
  if (sample_rate_hz <= 0.0) throw Error("sample_rate_hz must be positive");
  if (samples.rows() != static_cast<long>(channel_labels.size())) {
    throw CountMismatch("recording has " + std::to_string(samples.rows()) +
                        " sample rows but " +
                        std::to_string(channel_labels.size()) +
                        " channel labels");
  }
  std::set<std::string> seen;
  for (const auto& l : channel_labels) {
    if (!seen.insert(l).second) throw Error("duplicate channel label: " + l);
  }
  for (const auto& ev : events) {
    if (ev.onset_sample < 0 || ev.onset_sample >= n_samples()) {
      throw Error("event onset " + std::to_string(ev.onset_sample) +
                  " outside recorded span of " + std::to_string(n_samples()) +
                  " samples");
    }
    if (ev.stimulus_class < 0 || ev.stimulus_class > 5) {
      throw Error("stimulus_class " + std::to_string(ev.stimulus_class) +
                  " outside 0..5");
    }
  }
}

EpochExtraction extract_epochs(const Recording& rec, double window_ms) {
  rec.validate();
  const long window = std::lround(rec.sample_rate_hz * window_ms / 1000.0);
  if (window <= 0) throw Error("epoch window must span at least one sample");

  EpochExtraction out;
  out.epochs.reserve(rec.events.size());
  for (const auto& ev : rec.events) {
    if (ev.onset_sample + window > rec.n_samples()) {
      ++out.n_rejected;
      continue;
    }
    Epoch e;
    e.data = rec.samples.middleCols(ev.onset_sample, window);
    e.sample_rate_hz = rec.sample_rate_hz;
    e.channel_labels = rec.channel_labels;
    e.stimulus_class = ev.stimulus_class;
    e.is_target = ev.is_target;
    e.run_id = ev.run_id;
    e.trial_index = ev.sequence_index;
    e.group = ev.group;
    out.epochs.push_back(std::move(e));
  }
  return out;
}

Epoch select_montage(const Epoch& epoch, const ElectrodeMontage& montage) {
  Epoch out = epoch;
  out.data.resize(montage.n_channels(), epoch.n_samples());
  out.channel_labels = montage.channels;
  for (int i = 0; i < montage.n_channels(); ++i) {
    out.data.row(i) =
        epoch.data.row(index_of_channel(epoch.channel_labels, montage.channels[i]));
  }
  return out;
}

Recording select_channels(const Recording& rec,
                          const std::vector<std::string>& labels) {
  Recording out = rec;
  out.samples.resize(static_cast<long>(labels.size()), rec.n_samples());
  out.channel_labels = labels;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out.samples.row(static_cast<long>(i)) =
        rec.samples.row(index_of_channel(rec.channel_labels, labels[i]));
  }
  return out;
}

Recording rereference(const Recording& rec,
                      const std::vector<std::string>& reference_channels) {
  if (reference_channels.empty()) {
    throw Error("at least one reference channel required");
  }
  Eigen::RowVectorXd ref = Eigen::RowVectorXd::Zero(rec.n_samples());
  for (const auto& label : reference_channels) {
    ref += rec.samples.row(index_of_channel(rec.channel_labels, label));
  }
  ref /= static_cast<double>(reference_channels.size());

  Recording out = rec;
  out.samples.rowwise() -= ref;

  std::ostringstream note;
  note << "re-referenced to mean of";
  for (const auto& label : reference_channels) note << ' ' << label;
  if (!rec.reference_note.empty()) note << " (was: " << rec.reference_note << ")";
  out.reference_note = note.str();
  return out;
}

}  // namespace p300
