#include <Eigen/Dense>
#include <string>
#include <vector>

#include "doctest.h"
#include "p300/dataset.hpp"
#include "p300/error.hpp"
#include "p300/montage.hpp"
#include "p300/rng.hpp"

using namespace p300;

namespace {

Recording make_recording(const std::vector<std::string>& labels, double fs,
                         long n, std::uint64_t seed) {
  Recording rec;
  rec.sample_rate_hz = fs;
  rec.channel_labels = labels;
  rec.samples.resize(static_cast<long>(labels.size()), n);
  Rng rng(seed);
  for (long r = 0; r < rec.samples.rows(); ++r) {
    for (long c = 0; c < rec.samples.cols(); ++c) rec.samples(r, c) = rng.normal();
  }
  return rec;
}

}  // namespace

TEST_CASE("extract_epochs cuts one window per event and counts rejects") {
  Recording rec = make_recording({"Fz", "Cz", "Pz", "Oz"}, 2048.0, 4096, 1);
  rec.events.push_back({0, 2, true, 1, 0, StimulusGroup::kColumn});
  rec.events.push_back({2048, 4, false, 1, 1, StimulusGroup::kRow});
  rec.events.push_back({2049, 1, false, 2, 3, StimulusGroup::kNone});  // overruns

  const EpochExtraction ex = extract_epochs(rec);
  REQUIRE(ex.epochs.size() == 2);
  CHECK(ex.n_rejected == 1);

  const Epoch& first = ex.epochs[0];
  CHECK(first.n_samples() == 2048);  // 1000 ms at 2048 Hz
  CHECK(first.n_channels() == 4);
  CHECK(first.sample_rate_hz == 2048.0);
  CHECK(first.channel_labels == rec.channel_labels);
  CHECK(first.stimulus_class == 2);
  CHECK(first.is_target);
  CHECK(first.run_id == 1);
  CHECK(first.trial_index == 0);
  CHECK(first.group == StimulusGroup::kColumn);
  CHECK((first.data - rec.samples.middleCols(0, 2048)).cwiseAbs().maxCoeff() == 0.0);

  const Epoch& second = ex.epochs[1];
  CHECK(second.stimulus_class == 4);
  CHECK_FALSE(second.is_target);
  CHECK(second.trial_index == 1);
  CHECK(second.group == StimulusGroup::kRow);
  CHECK((second.data - rec.samples.middleCols(2048, 2048)).cwiseAbs().maxCoeff() ==
        0.0);
}

TEST_CASE("extract_epochs window length follows the sampling rate") {
  Recording rec = make_recording({"Cz"}, 512.0, 1024, 2);
  rec.events.push_back({100, 0, false, 0, 0, StimulusGroup::kNone});
  const EpochExtraction ex = extract_epochs(rec);
  REQUIRE(ex.epochs.size() == 1);
  CHECK(ex.epochs[0].n_samples() == 512);

  // Custom window: 250 ms at 512 Hz is 128 samples.
  const EpochExtraction quarter = extract_epochs(rec, 250.0);
  REQUIRE(quarter.epochs.size() == 1);
  CHECK(quarter.epochs[0].n_samples() == 128);
}

TEST_CASE("validate rejects malformed recordings") {
  Recording ok = make_recording({"Fz", "Cz"}, 512.0, 256, 3);
  CHECK_NOTHROW(ok.validate());

  Recording bad_rate = ok;
  bad_rate.sample_rate_hz = 0.0;
  CHECK_THROWS_AS(bad_rate.validate(), Error);

  Recording bad_labels = ok;
  bad_labels.channel_labels = {"Fz"};
  CHECK_THROWS_AS(bad_labels.validate(), CountMismatch);

  Recording dup = ok;
  dup.channel_labels = {"Fz", "Fz"};
  CHECK_THROWS_AS(dup.validate(), Error);

  Recording bad_onset = ok;
  bad_onset.events.push_back({256, 0, false, 0, 0, StimulusGroup::kNone});
  CHECK_THROWS_AS(bad_onset.validate(), Error);

  Recording bad_class = ok;
  bad_class.events.push_back({0, 6, false, 0, 0, StimulusGroup::kNone});
  CHECK_THROWS_AS(bad_class.validate(), Error);
}

TEST_CASE("select_montage reorders epoch channels into montage order") {
  Epoch e;
  e.sample_rate_hz = 512.0;
  e.channel_labels = {"Oz", "Pz", "Cz", "Fz"};
  e.data.resize(4, 3);
  e.data << 0, 1, 2,  //
      10, 11, 12,     //
      20, 21, 22,     //
      30, 31, 32;

  const Epoch sel = select_montage(e, config_i());  // Fz Cz Pz Oz
  REQUIRE(sel.n_channels() == 4);
  CHECK(sel.channel_labels == config_i().channels);
  CHECK(sel.data(0, 0) == 30.0);
  CHECK(sel.data(1, 0) == 20.0);
  CHECK(sel.data(2, 0) == 10.0);
  CHECK(sel.data(3, 0) == 0.0);
  CHECK(sel.sample_rate_hz == 512.0);

  Epoch missing = e;
  missing.channel_labels = {"Oz", "Pz", "Cz", "F3"};
  CHECK_THROWS_AS(select_montage(missing, config_i()), MissingChannel);
}

TEST_CASE("select_channels subsets a recording") {
  Recording rec = make_recording({"Fz", "Cz", "Pz", "Oz"}, 512.0, 64, 5);
  const Recording sub = select_channels(rec, {"Pz", "Fz"});
  REQUIRE(sub.n_channels() == 2);
  CHECK(sub.channel_labels == std::vector<std::string>{"Pz", "Fz"});
  CHECK((sub.samples.row(0) - rec.samples.row(2)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((sub.samples.row(1) - rec.samples.row(0)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sub.sample_rate_hz == 512.0);
  CHECK_THROWS_AS(select_channels(rec, {"Qz"}), MissingChannel);
}

TEST_CASE("rereference subtracts the mean of the reference channels") {
  Recording rec = make_recording({"Fz", "Cz", "M1", "M2"}, 512.0, 40, 7);
  const Recording ref = rereference(rec, {"M1", "M2"});
  REQUIRE(ref.n_channels() == 4);

  const Eigen::RowVectorXd mean =
      0.5 * (rec.samples.row(2) + rec.samples.row(3));
  for (long r = 0; r < 4; ++r) {
    CHECK((ref.samples.row(r) - (rec.samples.row(r) - mean)).cwiseAbs().maxCoeff() <
          1e-15);
  }
  // References themselves end up mirrored around zero.
  CHECK((ref.samples.row(2) + ref.samples.row(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(ref.reference_note.find("M1") != std::string::npos);
  CHECK(ref.reference_note.find("M2") != std::string::npos);
}

TEST_CASE("rereference with a single reference zeroes that channel") {
  Recording rec = make_recording({"Fz", "A1"}, 512.0, 16, 9);
  const Recording ref = rereference(rec, {"A1"});
  CHECK(ref.samples.row(1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ref.samples.row(0) - (rec.samples.row(0) - rec.samples.row(1)))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("rereference validates its inputs") {
  Recording rec = make_recording({"Fz", "Cz"}, 512.0, 16, 11);
  CHECK_THROWS_AS(rereference(rec, {}), Error);
  CHECK_THROWS_AS(rereference(rec, {"M9"}), MissingChannel);
}

TEST_CASE("montage_by_name accepts the documented aliases") {
  CHECK(&montage_by_name("I") == &config_i());
  CHECK(&montage_by_name("CONFIG_II") == &config_ii());
  CHECK(&montage_by_name("iii") == &config_iii());
  CHECK(&montage_by_name("config_ii") == &config_ii());
  CHECK(&montage_by_name("2") == &config_ii());
  CHECK(&montage_by_name("16") == &config_iii());
  CHECK_THROWS_AS(montage_by_name("IV"), Error);
  CHECK(builtin_montages().size() == 3);
}
