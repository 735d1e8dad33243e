#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "p300/container.hpp"
#include "p300/io_util.hpp"
#include "p300/model_io.hpp"

using namespace p300;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

// Runs the installed binary named by P300KIT_BIN with the given arguments.
CliResult run_cli(const std::string& args) {
  const char* bin = std::getenv("P300KIT_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "P300KIT_BIN must point at the CLI binary");
  const std::string cmd = "'" + std::string(bin) + "' " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult result;
  char buf[512];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) {
    result.output.append(buf, got);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

struct TempTree {
  std::string path;
  explicit TempTree(std::string p) : path(std::move(p)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempTree() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return path + "/" + name; }
};

}  // namespace

TEST_CASE("help exits 0 and usage errors exit 2") {
  CHECK(run_cli("--help").exit_code == 0);
  CHECK(run_cli("generate --help").exit_code == 0);
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("generate").exit_code == 2);  // --out and --seed are required
  CHECK(run_cli("evaluate --in no_such_file.p300 --family bayes_lda "
                "--montage I --seed 1")
            .exit_code == 2);
}

TEST_CASE("domain errors exit 1 with a message") {
  TempTree dir("cli_errors");
  const CliResult gen = run_cli("generate --out " + dir.file("g.p300") +
                                " --seed 4 --sequences 2 --trials 1 "
                                "--montage I --rate 64");
  REQUIRE(gen.exit_code == 0);

  const CliResult bad_family =
      run_cli("train --in " + dir.file("g.p300") + " --out " +
              dir.file("m.p300m") + " --family forest --montage I");
  CHECK(bad_family.exit_code == 1);
  CHECK(bad_family.output.find("error:") != std::string::npos);

  const CliResult bad_montage = run_cli(
      "generate --out " + dir.file("h.p300") + " --seed 1 --montage IV");
  CHECK(bad_montage.exit_code == 1);
  CHECK(bad_montage.output.find("error:") != std::string::npos);
}

TEST_CASE("generate writes a readable container and reports its size") {
  TempTree dir("cli_generate");
  const CliResult res = run_cli("generate --out " + dir.file("s.p300") +
                                " --seed 11 --sequences 3 --trials 2 "
                                "--montage I --rate 64");
  REQUIRE(res.exit_code == 0);
  CHECK(res.output.find("wrote 36 epochs") != std::string::npos);

  const EpochSet set = read_container(dir.file("s.p300"));
  CHECK(set.epochs.size() == 36);
  CHECK(set.sample_rate_hz == 64.0);
  CHECK(set.channel_labels.size() == 4);
  CHECK_FALSE(set.features);

  // Same seed, same bytes.
  const CliResult again = run_cli("generate --out " + dir.file("s2.p300") +
                                  " --seed 11 --sequences 3 --trials 2 "
                                  "--montage I --rate 64");
  REQUIRE(again.exit_code == 0);
  CHECK(read_file(dir.file("s.p300")) == read_file(dir.file("s2.p300")));
}

TEST_CASE("config files feed options with flags taking precedence") {
  TempTree dir("cli_config");
  write_file_atomic(dir.file("run.ini"),
                    "[generate]\n"
                    "sequences=6\n"
                    "trials=2\n"
                    "rate=64\n");
  const CliResult res =
      run_cli("--config " + dir.file("run.ini") + " generate --out " +
              dir.file("c.p300") + " --seed 2 --montage I --trials 1");
  REQUIRE(res.exit_code == 0);
  // 6 sequences from the config, 1 trial from the flag override.
  CHECK(read_container(dir.file("c.p300")).epochs.size() == 36);
}

TEST_CASE("generate, preprocess, train, evaluate round trip") {
  TempTree dir("cli_flow");
  REQUIRE(run_cli("generate --out " + dir.file("raw.p300") +
                  " --seed 21 --sequences 12 --trials 2 --montage II "
                  "--rate 64 --amplitude 2 --noise 0.5")
              .exit_code == 0);

  const CliResult pre =
      run_cli("preprocess --in " + dir.file("raw.p300") + " --out " +
              dir.file("feat.p300") + " --montage II");
  REQUIRE(pre.exit_code == 0);
  CHECK(pre.output.find("preprocessed 144 epochs") != std::string::npos);
  const EpochSet feat = read_container(dir.file("feat.p300"));
  CHECK(feat.features);
  CHECK(feat.sample_rate_hz == 32.0);
  CHECK(feat.channel_labels.size() == 8);

  // Preprocessing an already-preprocessed container is refused.
  CHECK(run_cli("preprocess --in " + dir.file("feat.p300") + " --out " +
                dir.file("x.p300") + " --montage II")
            .exit_code == 1);

  const CliResult tr = run_cli("train --in " + dir.file("feat.p300") +
                               " --out " + dir.file("model.p300m") +
                               " --family bayes_lda --montage I --hyper 0.1");
  REQUIRE(tr.exit_code == 0);
  CHECK(tr.output.find("trained BAYES_LDA on 144 epochs") !=
        std::string::npos);
  const TrainedClassifier model = load_model(dir.file("model.p300m"));
  CHECK(model.family == ClassifierFamily::kBayesLda);
  CHECK(model.dim() == 128);  // 4 electrodes x 32 samples

  // Features and raw containers evaluate identically given the same seed.
  const std::string eval_args = " --family bayes_lda --montage I --trials 2 "
                                "--k 3 --seed 5 --hyper 0.1";
  const CliResult ev_feat =
      run_cli("evaluate --in " + dir.file("feat.p300") + eval_args);
  REQUIRE(ev_feat.exit_code == 0);
  CHECK(ev_feat.output.find("accuracy ") != std::string::npos);
  CHECK(ev_feat.output.find("fold 0") != std::string::npos);
  const CliResult ev_raw =
      run_cli("evaluate --in " + dir.file("raw.p300") + eval_args);
  REQUIRE(ev_raw.exit_code == 0);
  CHECK(ev_feat.output == ev_raw.output);
}

TEST_CASE("convert feeds the standard flow") {
  TempTree dir("cli_convert");
  std::string cz_row, pz_row;
  for (int i = 0; i < 96; ++i) {
    if (i > 0) {
      cz_row += " ";
      pz_row += " ";
    }
    cz_row += std::to_string(1 + (i % 16));
    pz_row += "0";
  }
  write_file_atomic(dir.file("export.txt"),
                    "epfl_export 1\n"
                    "rate 32\n"
                    "channels 2 Cz Pz\n"
                    "samples 96\n"
                    "event onset=0 stimulus_class=2 is_target=1 run=1 "
                    "trial=0\n"
                    "event onset=32 stimulus_class=1 is_target=0 run=1 "
                    "trial=0\n"
                    "data\n" +
                        cz_row + "\n" + pz_row + "\n");
  const CliResult conv =
      run_cli("convert --in " + dir.file("export.txt") + " --out " +
              dir.file("conv.p300") + " --kind epfl");
  REQUIRE(conv.exit_code == 0);
  CHECK(conv.output.find("converted 2 epochs") != std::string::npos);
  const EpochSet set = read_container(dir.file("conv.p300"));
  CHECK(set.epochs.size() == 2);
  CHECK(set.sample_rate_hz == 32.0);

  CHECK(run_cli("convert --in " + dir.file("export.txt") + " --out " +
                dir.file("bad.p300") + " --kind gtec")
            .exit_code == 1);
}

TEST_CASE("sweep emits deterministic csv outputs") {
  TempTree dir("cli_sweep");
  REQUIRE(run_cli("generate --out " + dir.file("raw.p300") +
                  " --seed 31 --sequences 12 --trials 2 --montage II "
                  "--rate 64 --amplitude 2 --noise 0.5")
              .exit_code == 0);

  const std::string sweep_args =
      " --family bayes_lda --montage I,II --trials 1,2 --k 3 --seed 9 "
      "--tag epfl_synth --hyper 0.1 --in " + dir.file("raw.p300");
  REQUIRE(run_cli("sweep --outdir " + dir.file("out1") + sweep_args)
              .exit_code == 0);
  REQUIRE(run_cli("sweep --outdir " + dir.file("out2") + sweep_args)
              .exit_code == 0);

  const std::vector<std::string> names = {
      "curve_bayes_lda_CONFIG_I.csv", "curve_bayes_lda_CONFIG_II.csv",
      "table_trials.csv", "table_montage.csv"};
  for (const std::string& name : names) {
    CAPTURE(name);
    REQUIRE(std::filesystem::exists(dir.file("out1/" + name)));
    CHECK(read_file(dir.file("out1/" + name)) ==
          read_file(dir.file("out2/" + name)));
  }

  const std::string curve = read_file(dir.file("out1/curve_bayes_lda_CONFIG_I.csv"));
  CHECK(curve.rfind("n_trials,accuracy,n_sequences\n1,", 0) == 0);
  const std::string table = read_file(dir.file("out1/table_montage.csv"));
  CHECK(table.rfind("montage,epfl_synth\nCONFIG_I,", 0) == 0);
  CHECK(table.find("\nCONFIG_II,") != std::string::npos);

  // report merges the sweep tables and writes the anchor summary.
  const CliResult rep = run_cli(
      "report --in " + dir.file("out1/table_montage.csv") + "," +
      dir.file("out1/table_trials.csv") + " --outdir " + dir.file("rep") +
      " --reference");
  REQUIRE(rep.exit_code == 0);
  CHECK(std::filesystem::exists(dir.file("rep/table_montage.csv")));
  CHECK(std::filesystem::exists(dir.file("rep/table_trials.csv")));
  const std::string summary = read_file(dir.file("rep/summary.txt"));
  CHECK(summary.find("reference anchors") != std::string::npos);
  CHECK(summary.find("table montage: produced vs anchor") !=
        std::string::npos);
}
