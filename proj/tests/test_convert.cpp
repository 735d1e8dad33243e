#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "p300/convert.hpp"
#include "p300/error.hpp"
#include "p300/io_util.hpp"

using namespace p300;

namespace {

struct TempFile {
  std::string path;
  TempFile(std::string p, const std::string& content) : path(std::move(p)) {
    write_file_atomic(path, content);
  }
  ~TempFile() { std::remove(path.c_str()); }
};

// Swaps std::cerr's buffer so the converter notices can be asserted on.
struct CerrCapture {
  std::ostringstream sink;
  std::streambuf* saved;
  CerrCapture() : saved(std::cerr.rdbuf(sink.rdbuf())) {}
  ~CerrCapture() { std::cerr.rdbuf(saved); }
  std::string text() const { return sink.str(); }
};

const char* kEpflWithMastoids =
    "epfl_export 1\n"
    "rate 4\n"
    "channels 3 Cz M1 M2\n"
    "samples 8\n"
    "event onset=0 stimulus_class=2 is_target=1 run=3 trial=5\n"
    "event onset=4 stimulus_class=0 is_target=0 run=3 trial=6\n"
    "data\n"
    "10 11 12 13 14 15 16 17\n"
    "2 2 2 2 2 2 2 2\n"
    "4 4 4 4 4 4 4 4\n";

const char* kEpflNoMastoids =
    "epfl_export 1\n"
    "rate 4\n"
    "channels 2 Cz Pz\n"
    "samples 8\n"
    "event onset=0 stimulus_class=1 is_target=0 run=1 trial=0\n"
    "data\n"
    "1 2 3 4 5 6 7 8\n"
    "0 0 0 0 0 0 0 0\n";

const char* kBci2003 =
    "bci2003_export 1\n"
    "rate 4\n"
    "channels 1 Cz\n"
    "samples 12\n"
    "event onset=0 stimulus_code=3 is_target=0 run=1 trial=0\n"
    "event onset=4 stimulus_code=9 is_target=1 run=1 trial=0\n"
    "event onset=8 stimulus_code=11 is_target=0 run=1 trial=1\n"
    "data\n"
    "1 2 3 4 5 6 7 8 9 10 11 12\n";

}  // namespace

TEST_CASE("epfl export converts with mastoid rereferencing") {
  TempFile file("convert_epfl.txt", kEpflWithMastoids);
  CerrCapture cerr_log;
  const EpochSet set = convert_external(file.path, ExternalKind::kEpflMatExport);

  CHECK(set.sample_rate_hz == 4.0);
  CHECK(set.channel_labels == std::vector<std::string>{"Cz"});
  CHECK_FALSE(set.speller);
  CHECK_FALSE(set.features);
  REQUIRE(set.epochs.size() == 2);

  // The mastoid mean is 3 at every sample, so Cz drops by exactly 3.
  const Epoch& first = set.epochs[0];
  REQUIRE(first.data.rows() == 1);
  REQUIRE(first.data.cols() == 4);
  CHECK(first.data(0, 0) == 7.0);
  CHECK(first.data(0, 1) == 8.0);
  CHECK(first.data(0, 2) == 9.0);
  CHECK(first.data(0, 3) == 10.0);
  CHECK(first.stimulus_class == 2);
  CHECK(first.is_target);
  CHECK(first.run_id == 3);
  CHECK(first.trial_index == 5);
  CHECK(first.group == StimulusGroup::kNone);

  const Epoch& second = set.epochs[1];
  CHECK(second.data(0, 0) == 11.0);
  CHECK(second.stimulus_class == 0);
  CHECK_FALSE(second.is_target);
  CHECK(second.trial_index == 6);

  CHECK(cerr_log.text().empty());
}

TEST_CASE("absent mastoids leave the export's reference and say so") {
  TempFile file("convert_epfl_noref.txt", kEpflNoMastoids);
  CerrCapture cerr_log;
  const EpochSet set = convert_external(file.path, ExternalKind::kEpflMatExport);
  CHECK(set.channel_labels == std::vector<std::string>{"Cz", "Pz"});
  REQUIRE(set.epochs.size() == 1);
  CHECK(set.epochs[0].data(0, 2) == 3.0);
  CHECK(cerr_log.text().find("mastoids M1/M2 absent") != std::string::npos);
}

TEST_CASE("bci2003 codes map to rows and columns") {
  TempFile file("convert_bci.txt", kBci2003);
  CerrCapture cerr_log;
  const EpochSet set =
      convert_external(file.path, ExternalKind::kBci2003AsciiExport);
  CHECK(set.speller);
  REQUIRE(set.epochs.size() == 3);

  CHECK(set.epochs[0].group == StimulusGroup::kColumn);
  CHECK(set.epochs[0].stimulus_class == 3);
  CHECK(set.epochs[1].group == StimulusGroup::kRow);
  CHECK(set.epochs[1].stimulus_class == 3);
  CHECK(set.epochs[1].is_target);
  CHECK(set.epochs[2].group == StimulusGroup::kRow);
  CHECK(set.epochs[2].stimulus_class == 5);
  CHECK(set.epochs[2].trial_index == 1);
}

TEST_CASE("events running past the recording end are dropped with a notice") {
  const std::string text =
      "bci2003_export 1\n"
      "rate 4\n"
      "channels 1 Cz\n"
      "samples 6\n"
      "event onset=0 stimulus_code=0 is_target=0 run=1 trial=0\n"
      "event onset=4 stimulus_code=1 is_target=0 run=1 trial=0\n"
      "data\n"
      "1 2 3 4 5 6\n";
  TempFile file("convert_dropped.txt", text);
  CerrCapture cerr_log;
  const EpochSet set =
      convert_external(file.path, ExternalKind::kBci2003AsciiExport);
  CHECK(set.epochs.size() == 1);
  CHECK(cerr_log.text().find(
            "1 event(s) too close to the recording end were dropped") !=
        std::string::npos);
}

TEST_CASE("alias maps rename channels before anything else") {
  const std::string text =
      "epfl_export 1\n"
      "rate 4\n"
      "channels 3 Cz A1 A2\n"
      "samples 4\n"
      "event onset=0 stimulus_class=0 is_target=0 run=1 trial=0\n"
      "data\n"
      "5 5 5 5\n"
      "1 1 1 1\n"
      "3 3 3 3\n";
  TempFile data("convert_alias_data.txt", text);
  TempFile aliases("convert_alias_map.txt",
                   "# exported mastoid names\n"
                   "A1 M1\n"
                   "A2 M2\n");
  const EpochSet set = convert_external(
      data.path, ExternalKind::kEpflMatExport, aliases.path);
  CHECK(set.channel_labels == std::vector<std::string>{"Cz"});
  CHECK(set.epochs[0].data(0, 0) == 3.0);

  TempFile bad("convert_alias_bad.txt", "OnlyOneName\n");
  CHECK_THROWS_AS(
      convert_external(data.path, ExternalKind::kEpflMatExport, bad.path),
      SchemaMismatch);
}

TEST_CASE("external kind names are matched case insensitively") {
  CHECK(external_kind_from_name("epfl") == ExternalKind::kEpflMatExport);
  CHECK(external_kind_from_name("EPFL_MAT_EXPORT") ==
        ExternalKind::kEpflMatExport);
  CHECK(external_kind_from_name("BCI2003") ==
        ExternalKind::kBci2003AsciiExport);
  CHECK(external_kind_from_name("bci2003_ascii_export") ==
        ExternalKind::kBci2003AsciiExport);
  CHECK_THROWS_AS(external_kind_from_name("gtec"), SchemaMismatch);
  try {
    external_kind_from_name("gtec");
  } catch (const SchemaMismatch& e) {
    CHECK(e.field == "kind");
  }
}

TEST_CASE("schema violations name the offending field") {
  const auto field_of = [](const std::string& content, ExternalKind kind) {
    TempFile file("convert_schema_case.txt", content);
    try {
      convert_external(file.path, kind);
    } catch (const SchemaMismatch& e) {
      return e.field;
    } catch (const FormatVersionUnsupported&) {
      return std::string("version");
    }
    return std::string("(no throw)");
  };

  // Wrong magic for the requested kind.
  CHECK(field_of(kEpflWithMastoids, ExternalKind::kBci2003AsciiExport) ==
        "magic");
  // Unsupported version.
  CHECK(field_of("epfl_export 2\nrate 4\n", ExternalKind::kEpflMatExport) ==
        "version");
  // Bad rate.
  CHECK(field_of("epfl_export 1\nrate 0\n", ExternalKind::kEpflMatExport) ==
        "rate");
  // Label count disagrees with the declared count.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 2 Cz\nsamples 4\n",
                 ExternalKind::kEpflMatExport) == "channels");
  // Event line with a bare token.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset\ndata\n1 2 3 4\n",
                 ExternalKind::kEpflMatExport) == "event");
  // Unexpected line where events belong.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "bogus line\ndata\n1 2 3 4\n",
                 ExternalKind::kEpflMatExport) == "event");
  // Missing stimulus_code on a speller event.
  CHECK(field_of("bci2003_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=0 is_target=0 run=1 trial=0\ndata\n1 2 3 4\n",
                 ExternalKind::kBci2003AsciiExport) == "stimulus_code");
  // Code outside the speller alphabet.
  CHECK(field_of("bci2003_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=0 stimulus_code=12 is_target=0 run=1 trial=0\n"
                 "data\n1 2 3 4\n",
                 ExternalKind::kBci2003AsciiExport) == "stimulus_code");
  // Class outside 0..5.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=0 stimulus_class=6 is_target=0 run=1 trial=0\n"
                 "data\n1 2 3 4\n",
                 ExternalKind::kEpflMatExport) == "stimulus_class");
  // No data marker at all.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=0 stimulus_class=0 is_target=0 run=1 trial=0\n",
                 ExternalKind::kEpflMatExport) == "data");
  // Fewer channel rows than declared.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 2 Cz Pz\nsamples 4\n"
                 "event onset=0 stimulus_class=0 is_target=0 run=1 trial=0\n"
                 "data\n1 2 3 4\n",
                 ExternalKind::kEpflMatExport) == "data");
  // A channel row that ends early.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=0 stimulus_class=0 is_target=0 run=1 trial=0\n"
                 "data\n1 2 3\n",
                 ExternalKind::kEpflMatExport) == "data");
  // A non-integer event value.
  CHECK(field_of("epfl_export 1\nrate 4\nchannels 1 Cz\nsamples 4\n"
                 "event onset=x stimulus_class=0 is_target=0 run=1 trial=0\n"
                 "data\n1 2 3 4\n",
                 ExternalKind::kEpflMatExport) == "onset");
}

TEST_CASE("comments and blank lines between events are ignored") {
  const std::string text =
      "epfl_export 1\n"
      "rate 4\n"
      "channels 1 Cz\n"
      "samples 4\n"
      "# exported by site A\n"
      "\n"
      "event onset=0 stimulus_class=4 is_target=1 run=2 trial=9\n"
      "data\n"
      "1 2 3 4\n";
  TempFile file("convert_comments.txt", text);
  CerrCapture cerr_log;
  const EpochSet set = convert_external(file.path, ExternalKind::kEpflMatExport);
  REQUIRE(set.epochs.size() == 1);
  CHECK(set.epochs[0].stimulus_class == 4);
  CHECK(set.epochs[0].run_id == 2);
}
