#include <algorithm>
#include <cctype>
#include <iostream>
#include <map>
#include <sstream>

#include "p300/convert.hpp"
#include "p300/error.hpp"
#include "p300/io_util.hpp"

namespace p300 {

namespace {

std::map<std::string, std::string> parse_event_fields(const std::string& line) {
  std::istringstream in(line);
  std::string token;
  in >> token;  // the "event" keyword
  std::map<std::string, std::string> fields;
  while (in >> token) {
    const std::size_t eq = token.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw SchemaMismatch("event", "expected key=value, got '" + token + "'");
    }
    fields[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return fields;
}

long field_as_long(const std::map<std::string, std::string>& fields,
                   const std::string& key) {
  const auto it = fields.find(key);
  if (it == fields.end()) {
    throw SchemaMismatch(key, "event line is missing it");
  }
  try {
    std::size_t used = 0;
    const long value = std::stol(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(it->second);
    return value;
  } catch (const std::exception&) {
    throw SchemaMismatch(key, "value '" + it->second + "' is not an integer");
  }
}

std::map<std::string, std::string> load_alias_map(const std::string& path) {
  std::map<std::string, std::string> aliases;
  if (path.empty()) return aliases;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::string from, to;
    if (!(row >> from >> to)) {
      throw SchemaMismatch("alias", "bad alias line '" + line + "'");
    }
    aliases[from] = to;
  }
  return aliases;
}

}  // namespace

ExternalKind external_kind_from_name(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "epfl" || s == "epfl_mat_export") {
    return ExternalKind::kEpflMatExport;
  }
  if (s == "bci2003" || s == "bci2003_ascii_export") {
    return ExternalKind::kBci2003AsciiExport;
  }
  throw SchemaMismatch("kind", "unknown export kind '" + name + "'");
}

EpochSet convert_external(const std::string& path, ExternalKind kind,
                          const std::string& alias_path) {
  const bool speller = (kind == ExternalKind::kBci2003AsciiExport);
  const std::string expected_magic =
      speller ? "bci2003_export" : "epfl_export";

  std::istringstream in(read_file(path));
  std::string line;

  if (!std::getline(in, line)) throw SchemaMismatch("magic", "empty file");
  {
    std::istringstream head(line);
    std::string magic;
    int version = -1;
    head >> magic >> version;
    if (magic != expected_magic) {
      throw SchemaMismatch("magic", "expected '" + expected_magic +
                                        "', got '" + magic + "'");
    }
    if (version != 1) {
      throw FormatVersionUnsupported("export version " +
                                     std::to_string(version));
    }
  }

  Recording rec;
  long n_samples = -1;
  const std::map<std::string, std::string> aliases =
      load_alias_map(alias_path);

  // Header keys come in fixed order: rate, channels, samples.
  if (!std::getline(in, line)) throw SchemaMismatch("rate", "missing line");
  {
    std::istringstream row(line);
    std::string key;
    row >> key >> rec.sample_rate_hz;
    if (key != "rate" || !(rec.sample_rate_hz > 0.0)) {
      throw SchemaMismatch("rate", "expected positive sampling rate");
    }
  }
  if (!std::getline(in, line)) {
    throw SchemaMismatch("channels", "missing line");
  }
  {
    std::istringstream row(line);
    std::string key;
    long declared = -1;
    row >> key >> declared;
    if (key != "channels" || declared < 1) {
      throw SchemaMismatch("channels", "expected positive channel count");
    }
    std::string label;
    while (row >> label) {
      const auto alias = aliases.find(label);
      rec.channel_labels.push_back(
          alias == aliases.end() ? label : alias->second);
    }
    if (static_cast<long>(rec.channel_labels.size()) != declared) {
      throw SchemaMismatch(
          "channels", "declares " + std::to_string(declared) +
                          " labels, found " +
                          std::to_string(rec.channel_labels.size()));
    }
  }
  if (!std::getline(in, line)) throw SchemaMismatch("samples", "missing line");
  {
    std::istringstream row(line);
    std::string key;
    row >> key >> n_samples;
    if (key != "samples" || n_samples < 1) {
      throw SchemaMismatch("samples", "expected positive sample count");
    }
  }

  while (std::getline(in, line)) {
    if (line == "data") break;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("event", 0) != 0) {
      throw SchemaMismatch("event", "unexpected line '" + line + "'");
    }
    const auto fields = parse_event_fields(line);
    StimulusEvent ev;
    ev.onset_sample = field_as_long(fields, "onset");
    ev.is_target = field_as_long(fields, "is_target") != 0;
    ev.run_id = static_cast<int>(field_as_long(fields, "run"));
    ev.sequence_index = static_cast<int>(field_as_long(fields, "trial"));
    if (speller) {
      const long code = field_as_long(fields, "stimulus_code");
      if (code < 0 || code > 11) {
        throw SchemaMismatch("stimulus_code",
                             "value " + std::to_string(code) +
                                 " outside 0..11");
      }
      ev.group = code < 6 ? StimulusGroup::kColumn : StimulusGroup::kRow;
      ev.stimulus_class = static_cast<int>(code % 6);
    } else {
      const long cls = field_as_long(fields, "stimulus_class");
      if (cls < 0 || cls > 5) {
        throw SchemaMismatch("stimulus_class", "value " +
                                                   std::to_string(cls) +
                                                   " outside 0..5");
      }
      ev.group = StimulusGroup::kNone;
      ev.stimulus_class = static_cast<int>(cls);
    }
    rec.events.push_back(ev);
  }
  if (line != "data") throw SchemaMismatch("data", "marker not found");

  rec.samples.resize(static_cast<long>(rec.channel_labels.size()), n_samples);
  for (long ch = 0; ch < rec.samples.rows(); ++ch) {
    if (!std::getline(in, line)) {
      throw SchemaMismatch("data", "only " + std::to_string(ch) + " of " +
                                       std::to_string(rec.samples.rows()) +
                                       " channel rows present");
    }
    std::istringstream row(line);
    for (long s = 0; s < n_samples; ++s) {
      if (!(row >> rec.samples(ch, s))) {
        throw SchemaMismatch("data", "channel " + rec.channel_labels[ch] +
                                         " row ends after " +
                                         std::to_string(s) + " of " +
                                         std::to_string(n_samples) +
                                         " samples");
      }
    }
  }

  rec.reference_note = "as exported";
  rec.validate();

  const bool has_mastoids =
      std::count(rec.channel_labels.begin(), rec.channel_labels.end(), "M1") >
          0 &&
      std::count(rec.channel_labels.begin(), rec.channel_labels.end(), "M2") >
          0;
  if (has_mastoids) {
    rec = rereference(rec, {"M1", "M2"});
    // The mastoid rows only served as the reference; drop them.
    Recording trimmed;
    trimmed.sample_rate_hz = rec.sample_rate_hz;
    trimmed.reference_note = rec.reference_note;
    trimmed.events = rec.events;
    for (long ch = 0; ch < rec.samples.rows(); ++ch) {
      if (rec.channel_labels[ch] == "M1" || rec.channel_labels[ch] == "M2") {
        continue;
      }
      trimmed.channel_labels.push_back(rec.channel_labels[ch]);
    }
    trimmed.samples.resize(
        static_cast<long>(trimmed.channel_labels.size()), n_samples);
    long at = 0;
    for (long ch = 0; ch < rec.samples.rows(); ++ch) {
      if (rec.channel_labels[ch] == "M1" || rec.channel_labels[ch] == "M2") {
        continue;
      }
      trimmed.samples.row(at++) = rec.samples.row(ch);
    }
    rec = std::move(trimmed);
  } else {
    std::cerr << "notice: mastoids M1/M2 absent, keeping the export's own "
                 "reference\n";
  }

  const EpochExtraction extraction = extract_epochs(rec, 1000.0);
  if (extraction.n_rejected > 0) {
    std::cerr << "notice: " << extraction.n_rejected
              << " event(s) too close to the recording end were dropped\n";
  }

  EpochSet set;
  set.sample_rate_hz = rec.sample_rate_hz;
  set.channel_labels = rec.channel_labels;
  set.speller = speller;
  set.features = false;
  set.epochs = extraction.epochs;
  return set;
}

}  // namespace p300
