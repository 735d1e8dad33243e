#include <bit>
#include <cstdint>
#include <cstring>
#include <sstream>

#include "p300/container.hpp"
#include "p300/error.hpp"
#include "p300/io_util.hpp"

namespace p300 {

namespace {

constexpr const char* kMagic = "p300epochs";
constexpr int kVersion = 1;

std::uint64_t to_le_bits(double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof bits);
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  return bits;
}

double from_le_bits(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::big) {
    bits = __builtin_bswap64(bits);
  }
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

void append_doubles(std::string& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t bits = to_le_bits(data[i]);
    out.append(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
}

// Sequential line reader that tracks line numbers for diagnostics.
class LineParser {
 public:
  explicit LineParser(const std::string& text) : text_(text) {}

  std::string next(const std::string& what) {
    if (pos_ >= text_.size()) {
      throw Error("unexpected end of header, expected " + what);
    }
    const std::size_t nl = text_.find('\n', pos_);
    if (nl == std::string::npos) {
      throw Error("line " + std::to_string(line_) + ": missing newline");
    }
    std::string line = text_.substr(pos_, nl - pos_);
    pos_ = nl + 1;
    ++line_;
    return line;
  }

  int line() const { return line_; }
  std::size_t offset() const { return pos_; }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 0;
};

std::string where(const LineParser& p) {
  return "line " + std::to_string(p.line()) + ": ";
}

}  // namespace

void write_container(const EpochSet& set, const std::string& path) {
  const long n_epochs = static_cast<long>(set.epochs.size());
  const long n_channels = static_cast<long>(set.channel_labels.size());
  long n_time = 0;
  if (n_epochs > 0) n_time = set.epochs.front().data.cols();

  for (const Epoch& ep : set.epochs) {
    if (ep.data.rows() != n_channels || ep.data.cols() != n_time) {
      throw CountMismatch("epoch shape " + std::to_string(ep.data.rows()) +
                          "x" + std::to_string(ep.data.cols()) +
                          " does not match the set's " +
                          std::to_string(n_channels) + "x" +
                          std::to_string(n_time));
    }
    if (ep.stimulus_class < 0 || ep.stimulus_class > 5) {
      throw Error("stimulus class " + std::to_string(ep.stimulus_class) +
                  " outside 0..5");
    }
  }

  std::ostringstream header;
  header << kMagic << " " << kVersion << "\n";
  header << "kind " << (set.features ? "features" : "raw") << "\n";
  header.precision(17);
  header << "sample_rate_hz " << set.sample_rate_hz << "\n";
  header << "time_samples " << n_time << "\n";
  header << "channels " << n_channels;
  for (const std::string& label : set.channel_labels) header << " " << label;
  header << "\n";
  header << "epochs " << n_epochs << "\n";
  header << "speller " << (set.speller ? 1 : 0) << "\n";
  for (const Epoch& ep : set.epochs) {
    header << "epoch " << ep.stimulus_class << " " << (ep.is_target ? 1 : 0)
           << " " << ep.run_id << " " << ep.trial_index << " "
           << static_cast<int>(ep.group) << "\n";
  }
  header << "payload\n";

  std::string blob = std::move(header).str();
  blob.reserve(blob.size() +
               static_cast<std::size_t>(n_epochs * n_channels * n_time) * 8);
  for (const Epoch& ep : set.epochs) {
    for (long ch = 0; ch < n_channels; ++ch) {
      const Eigen::VectorXd row = ep.data.row(ch).transpose();
      append_doubles(blob, row.data(), static_cast<std::size_t>(n_time));
    }
  }
  write_file_atomic(path, blob);
}

EpochSet read_container(const std::string& path) {
  const std::string blob = read_file(path);
  LineParser parser(blob);

  {
    std::istringstream head(parser.next("magic line"));
    std::string magic;
    int version = -1;
    head >> magic >> version;
    if (magic != kMagic) {
      throw FormatVersionUnsupported(where(parser) + "not a " +
                                     std::string(kMagic) + " file");
    }
    if (version != kVersion) {
      throw FormatVersionUnsupported(where(parser) + "version " +
                                     std::to_string(version) +
                                     " unsupported (expected 1)");
    }
  }

  EpochSet set;
  {
    std::istringstream line(parser.next("kind line"));
    std::string key, kind;
    line >> key >> kind;
    if (key != "kind" || (kind != "raw" && kind != "features")) {
      throw Error(where(parser) + "expected 'kind raw|features'");
    }
    set.features = (kind == "features");
  }
  {
    std::istringstream line(parser.next("sample_rate_hz line"));
    std::string key;
    line >> key >> set.sample_rate_hz;
    if (key != "sample_rate_hz" || !(set.sample_rate_hz > 0.0)) {
      throw Error(where(parser) + "expected positive sample_rate_hz");
    }
  }
  long n_time = -1;
  {
    std::istringstream line(parser.next("time_samples line"));
    std::string key;
    line >> key >> n_time;
    if (key != "time_samples" || n_time < 1) {
      throw Error(where(parser) + "expected positive time_samples");
    }
  }
  {
    std::istringstream line(parser.next("channels line"));
    std::string key;
    long declared = -1;
    line >> key >> declared;
    if (key != "channels" || declared < 1) {
      throw Error(where(parser) + "expected positive channel count");
    }
    std::string label;
    while (line >> label) set.channel_labels.push_back(label);
    if (static_cast<long>(set.channel_labels.size()) != declared) {
      throw CountMismatch(where(parser) + "channels declares " +
                          std::to_string(declared) + " labels, found " +
                          std::to_string(set.channel_labels.size()));
    }
  }
  long n_epochs = -1;
  {
    std::istringstream line(parser.next("epochs line"));
    std::string key;
    line >> key >> n_epochs;
    if (key != "epochs" || n_epochs < 0) {
      throw Error(where(parser) + "expected non-negative epoch count");
    }
  }
  {
    std::istringstream line(parser.next("speller line"));
    std::string key;
    int flag = -1;
    line >> key >> flag;
    if (key != "speller" || (flag != 0 && flag != 1)) {
      throw Error(where(parser) + "expected 'speller 0|1'");
    }
    set.speller = (flag == 1);
  }

  const long n_channels = static_cast<long>(set.channel_labels.size());
  set.epochs.reserve(static_cast<std::size_t>(n_epochs));
  for (long e = 0; e < n_epochs; ++e) {
    std::istringstream line(parser.next("epoch meta line"));
    std::string key;
    int cls = -1, target = -1, group = -1;
    Epoch ep;
    line >> key >> cls >> target >> ep.run_id >> ep.trial_index >> group;
    if (key == "payload") {
      throw CountMismatch(where(parser) + "header declares " +
                          std::to_string(n_epochs) +
                          " epochs but only " + std::to_string(e) +
                          " meta lines precede the payload");
    }
    if (key != "epoch" || line.fail()) {
      throw Error(where(parser) + "malformed epoch meta line");
    }
    if (cls < 0 || cls > 5) {
      throw Error(where(parser) + "stimulus class " + std::to_string(cls) +
                  " outside 0..5");
    }
    if (target != 0 && target != 1) {
      throw Error(where(parser) + "is_target must be 0 or 1");
    }
    if (group < 0 || group > 2) {
      throw Error(where(parser) + "group must be 0, 1, or 2");
    }
    ep.stimulus_class = cls;
    ep.is_target = (target == 1);
    ep.group = static_cast<StimulusGroup>(group);
    ep.sample_rate_hz = set.sample_rate_hz;
    ep.channel_labels = set.channel_labels;
    set.epochs.push_back(std::move(ep));
  }

  if (parser.next("payload marker") != "payload") {
    throw Error(where(parser) + "expected 'payload'");
  }

  const std::size_t actual = blob.size() - parser.offset();
  const std::size_t expected =
      static_cast<std::size_t>(n_epochs) * static_cast<std::size_t>(n_channels) *
      static_cast<std::size_t>(n_time) * 8;
  if (actual != expected) {
    const std::size_t per_channel =
        static_cast<std::size_t>(n_epochs) * static_cast<std::size_t>(n_time) * 8;
    if (per_channel > 0 && actual % per_channel == 0) {
      throw CountMismatch("header declares " + std::to_string(n_channels) +
                          " channels, payload implies " +
                          std::to_string(actual / per_channel));
    }
    throw TruncatedPayload("expected " + std::to_string(expected) +
                           " payload bytes, found " + std::to_string(actual));
  }

  const char* cursor = blob.data() + parser.offset();
  for (Epoch& ep : set.epochs) {
    ep.data.resize(n_channels, n_time);
    for (long ch = 0; ch < n_channels; ++ch) {
      for (long t = 0; t < n_time; ++t) {
        std::uint64_t bits;
        std::memcpy(&bits, cursor, sizeof bits);
        cursor += sizeof bits;
        ep.data(ch, t) = from_le_bits(bits);
      }
    }
  }
  return set;
}

EpochSet epoch_set_from_features(const std::vector<FeatureVector>& features,
                                 bool speller) {
  if (features.empty()) throw EmptyInput("epoch_set_from_features");
  EpochSet set;
  set.sample_rate_hz = kFeatureRateHz;
  set.channel_labels = features.front().channel_labels;
  set.speller = speller;
  set.features = true;
  const long n_ch = static_cast<long>(set.channel_labels.size());

  for (const FeatureVector& fv : features) {
    if (fv.channel_labels != set.channel_labels) {
      throw Error("feature vectors carry differing channel labels");
    }
    Epoch ep;
    ep.sample_rate_hz = kFeatureRateHz;
    ep.channel_labels = set.channel_labels;
    ep.stimulus_class = fv.stimulus_class;
    ep.is_target = fv.label;
    ep.run_id = fv.run_id;
    ep.trial_index = fv.trial_index;
    ep.group = fv.group;
    ep.data.resize(n_ch, fv.n_time);
    for (long ch = 0; ch < n_ch; ++ch) {
      ep.data.row(ch) =
          fv.values.segment(ch * fv.n_time, fv.n_time).transpose();
    }
    set.epochs.push_back(std::move(ep));
  }
  return set;
}

std::vector<FeatureVector> features_from_epoch_set(const EpochSet& set) {
  if (!set.features) {
    throw Error("container holds raw epochs; run the pipeline first");
  }
  std::vector<FeatureVector> out;
  out.reserve(set.epochs.size());
  for (const Epoch& ep : set.epochs) {
    FeatureVector fv;
    fv.n_time = static_cast<int>(ep.data.cols());
    fv.channel_labels = ep.channel_labels;
    fv.label = ep.is_target;
    fv.stimulus_class = ep.stimulus_class;
    fv.run_id = ep.run_id;
    fv.trial_index = ep.trial_index;
    fv.group = ep.group;
    fv.values.resize(ep.data.rows() * ep.data.cols());
    for (long ch = 0; ch < ep.data.rows(); ++ch) {
      fv.values.segment(ch * ep.data.cols(), ep.data.cols()) =
          ep.data.row(ch).transpose();
    }
    out.push_back(std::move(fv));
  }
  return out;
}

}  // namespace p300
