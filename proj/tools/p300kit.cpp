#include <algorithm>
#include <cstdint>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p300/container.hpp"
#include "p300/convert.hpp"
#include "p300/error.hpp"
#include "p300/evaluation.hpp"
#include "p300/io_util.hpp"
#include "p300/model_io.hpp"
#include "p300/montage.hpp"
#include "p300/report.hpp"
#include "p300/synth.hpp"

namespace {

using namespace p300;

std::vector<ElectrodeMontage> parse_montages(const std::string& csv) {
  std::vector<ElectrodeMontage> montages;
  std::string token;
  std::istringstream in(csv);
  while (std::getline(in, token, ',')) {
    if (!token.empty()) montages.push_back(montage_by_name(token));
  }
  if (montages.empty()) throw Error("no montage named in '" + csv + "'");
  return montages;
}

const ElectrodeMontage& largest_montage(
    const std::vector<ElectrodeMontage>& montages) {
  const auto it = std::max_element(
      montages.begin(), montages.end(),
      [](const ElectrodeMontage& a, const ElectrodeMontage& b) {
        return a.n_channels() < b.n_channels();
      });
  return *it;
}

// Loads a container as features: already-preprocessed sets are taken as-is
// (optionally cut down to the montage), raw sets run through the pipeline.
std::vector<FeatureVector> load_features(const std::string& path,
                                         const ElectrodeMontage& montage,
                                         bool* speller) {
  const EpochSet set = read_container(path);
  if (speller) *speller = set.speller;
  std::vector<FeatureVector> feats;
  if (set.features) {
    feats = features_from_epoch_set(set);
    for (FeatureVector& fv : feats) fv = select_montage(fv, montage);
  } else {
    feats.reserve(set.epochs.size());
    for (const Epoch& ep : set.epochs) {
      feats.push_back(preprocess_epoch(ep, montage));
    }
  }
  return feats;
}

AccuracyCurve average_curves(const AccuracyCurve& a, const AccuracyCurve& b) {
  AccuracyCurve merged = a;
  for (std::size_t i = 0; i < merged.points.size(); ++i) {
    merged.points[i].accuracy =
        0.5 * (a.points[i].accuracy + b.points[i].accuracy);
    merged.points[i].n_sequences =
        a.points[i].n_sequences + b.points[i].n_sequences;
  }
  return merged;
}

struct GenerateArgs {
  std::string out;
  std::uint64_t seed = 0;
  int sequences = 200;
  int trials = 5;
  std::string montage = "II";
  double rate = 128.0;
  double amplitude = 1.0;
  double noise = 1.0;
  double latency = 300.0;
};

void run_generate(const GenerateArgs& args) {
  SynthSpec spec;
  spec.n_sequences = args.sequences;
  spec.n_trials = args.trials;
  spec.montage = montage_by_name(args.montage);
  spec.sample_rate_hz = args.rate;
  spec.p300_amplitude_uv = args.amplitude;
  spec.noise_std_uv = args.noise;
  spec.latency_ms = args.latency;
  spec.seed = args.seed;

  const SynthSession session = generate_session(spec);
  EpochSet set;
  set.sample_rate_hz = spec.sample_rate_hz;
  set.channel_labels = spec.montage.channels;
  set.epochs = session.epochs;
  write_container(set, args.out);
  std::cout << "wrote " << set.epochs.size() << " epochs ("
            << spec.n_sequences << " sequences x " << spec.n_trials
            << " trials x 6 classes) to " << args.out << "\n";
}

struct PreprocessArgs {
  std::string in, out, montage;
};

void run_preprocess(const PreprocessArgs& args) {
  const EpochSet raw = read_container(args.in);
  if (raw.features) {
    throw Error(args.in + " already holds pipeline features");
  }
  const ElectrodeMontage montage = montage_by_name(args.montage);
  std::vector<FeatureVector> feats;
  feats.reserve(raw.epochs.size());
  for (const Epoch& ep : raw.epochs) {
    feats.push_back(preprocess_epoch(ep, montage));
  }
  write_container(epoch_set_from_features(feats, raw.speller), args.out);
  std::cout << "preprocessed " << feats.size() << " epochs at montage "
            << montage.name << " into " << args.out << "\n";
}

struct ConvertArgs {
  std::string in, out, kind, aliases;
};

void run_convert(const ConvertArgs& args) {
  const EpochSet set =
      convert_external(args.in, external_kind_from_name(args.kind),
                       args.aliases);
  write_container(set, args.out);
  std::cout << "converted " << set.epochs.size() << " epochs ("
            << set.channel_labels.size() << " channels at "
            << set.sample_rate_hz << " Hz) to " << args.out << "\n";
}

struct TrainArgs {
  std::string in, out, family, montage;
  double hyper = std::numeric_limits<double>::quiet_NaN();
};

void run_train(const TrainArgs& args) {
  const ElectrodeMontage montage = montage_by_name(args.montage);
  const std::vector<FeatureVector> feats =
      load_features(args.in, montage, nullptr);
  const TrainedClassifier clf =
      train(family_from_name(args.family),
            TrainingSet::from_features(feats), args.hyper);
  save_model(clf, args.out);
  std::cout << "trained " << family_name(clf.family) << " on "
            << feats.size() << " epochs, model written to " << args.out
            << "\n";
}

struct EvaluateArgs {
  std::string in, family, montage;
  int trials = 5;
  int k = 10;
  std::uint64_t seed = 0;
  double hyper = std::numeric_limits<double>::quiet_NaN();
};

void print_cv(const std::string& prefix, const CvResult& result) {
  std::cout << prefix << "accuracy " << std::fixed;
  std::cout.precision(4);
  std::cout << result.accuracy << "\n";
  for (std::size_t f = 0; f < result.per_fold.size(); ++f) {
    std::cout << prefix << "fold " << f << " " << result.per_fold[f] << "\n";
  }
}

void run_evaluate(const EvaluateArgs& args) {
  const ElectrodeMontage montage = montage_by_name(args.montage);
  bool speller = false;
  const std::vector<FeatureVector> feats =
      load_features(args.in, montage, &speller);
  const ClassifierFamily family = family_from_name(args.family);

  if (speller) {
    const RowColSequences rc = rowcol_to_sequences(feats);
    const CvResult rows = cross_validated_accuracy(
        rc.rows, family, montage, args.trials, args.k, args.seed, args.hyper);
    const CvResult cols = cross_validated_accuracy(
        rc.cols, family, montage, args.trials, args.k, args.seed, args.hyper);
    print_cv("rows_", rows);
    print_cv("cols_", cols);
    std::cout << "accuracy " << std::fixed;
    std::cout.precision(4);
    std::cout << 0.5 * (rows.accuracy + cols.accuracy) << "\n";
  } else {
    const CvResult result = cross_validated_accuracy(
        sequences_from_features(feats), family, montage, args.trials, args.k,
        args.seed, args.hyper);
    print_cv("", result);
  }
}

struct SweepArgs {
  std::string in, family, montages = "II", outdir, tag = "synthetic";
  std::vector<int> trials{2, 5, 10};
  int k = 10;
  std::uint64_t seed = 0;
  double hyper = std::numeric_limits<double>::quiet_NaN();
};

void run_sweep(const SweepArgs& args) {
  const std::vector<ElectrodeMontage> montages = parse_montages(args.montages);
  const ClassifierFamily family = family_from_name(args.family);
  bool speller = false;
  const std::vector<FeatureVector> feats =
      load_features(args.in, largest_montage(montages), &speller);

  std::vector<std::vector<SequenceRecord>> tasks;
  if (speller) {
    RowColSequences rc = rowcol_to_sequences(feats);
    tasks.push_back(std::move(rc.rows));
    tasks.push_back(std::move(rc.cols));
  } else {
    tasks.push_back(sequences_from_features(feats));
  }

  ReportInputs report;
  for (const ElectrodeMontage& montage : montages) {
    AccuracyCurve curve = sweep_trials(tasks[0], family, montage, args.trials,
                                       args.k, args.seed, args.tag,
                                       args.hyper);
    if (tasks.size() == 2) {
      curve = average_curves(
          curve, sweep_trials(tasks[1], family, montage, args.trials, args.k,
                              args.seed, args.tag, args.hyper));
    }
    report.curves.push_back(std::move(curve));
  }

  // The trial-axis table tracks the largest montage's curve; the montage
  // table is evaluated at the largest requested trial count.
  {
    const AccuracyCurve& curve = report.curves.back();
    ComparisonTable trials_table;
    trials_table.column_labels = {args.tag};
    trials_table.cells.resize(static_cast<long>(curve.points.size()), 1);
    for (std::size_t p = 0; p < curve.points.size(); ++p) {
      trials_table.row_labels.push_back(
          std::to_string(curve.points[p].n_trials));
      trials_table.cells(static_cast<long>(p), 0) =
          100.0 * curve.points[p].accuracy;
    }
    report.tables.emplace_back("trials", std::move(trials_table));
  }
  if (montages.size() > 1) {
    const int n_trials = args.trials.back();
    ComparisonTable table = sweep_montages(tasks[0], family, montages,
                                           n_trials, args.k, args.seed,
                                           args.tag, args.hyper);
    if (tasks.size() == 2) {
      const ComparisonTable cols_table =
          sweep_montages(tasks[1], family, montages, n_trials, args.k,
                         args.seed, args.tag, args.hyper);
      table.cells = 0.5 * (table.cells + cols_table.cells);
    }
    report.tables.emplace_back("montage", std::move(table));
  }

  emit_report(report, args.outdir);
  std::cout << "sweep outputs written to " << args.outdir << "\n";
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string outdir;
  bool reference = false;
};

void run_report(const ReportArgs& args) {
  std::map<std::string, std::vector<ComparisonTable>> by_axis;
  for (const std::string& path : args.inputs) {
    std::string axis;
    ComparisonTable table = table_from_csv(read_file(path), &axis);
    by_axis[axis].push_back(std::move(table));
  }

  ReportInputs report;
  for (auto& [axis, tables] : by_axis) {
    report.tables.emplace_back(axis, merge_tables(tables));
  }
  emit_report(report, args.outdir, args.reference);
  if (!report.tables.empty()) {
    std::cout << "merged report written to " << args.outdir << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P300 detection toolkit: synthetic sessions, preprocessing, "
               "classifiers, and sequence-level evaluation"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "INI file of option defaults, one [section] per subcommand; "
                 "flags given on the command line win");

  GenerateArgs gen;
  CLI::App* c_gen = app.add_subcommand(
      "generate", "Generate a synthetic session container");
  c_gen->add_option("--out", gen.out, "Output container path")->required();
  c_gen->add_option("--seed", gen.seed, "Generator seed")->required();
  c_gen->add_option("--sequences", gen.sequences, "Sequence count");
  c_gen->add_option("--trials", gen.trials, "Trials per sequence");
  c_gen->add_option("--montage", gen.montage, "Montage (I, II, III)");
  c_gen->add_option("--rate", gen.rate, "Sampling rate in Hz");
  c_gen->add_option("--amplitude", gen.amplitude, "Template amplitude (uV)");
  c_gen->add_option("--noise", gen.noise, "Noise standard deviation (uV)");
  c_gen->add_option("--latency", gen.latency, "Template latency (ms)");

  PreprocessArgs pre;
  CLI::App* c_pre = app.add_subcommand(
      "preprocess", "Run the pipeline over a raw container");
  c_pre->add_option("--in", pre.in, "Raw epoch container")
      ->required()
      ->check(CLI::ExistingFile);
  c_pre->add_option("--out", pre.out, "Feature container path")->required();
  c_pre->add_option("--montage", pre.montage, "Montage (I, II, III)")
      ->required();

  ConvertArgs conv;
  CLI::App* c_conv = app.add_subcommand(
      "convert", "Convert an intermediate text export to a container");
  c_conv->add_option("--in", conv.in, "Export text file")
      ->required()
      ->check(CLI::ExistingFile);
  c_conv->add_option("--out", conv.out, "Output container path")->required();
  c_conv->add_option("--kind", conv.kind, "epfl or bci2003")->required();
  c_conv->add_option("--aliases", conv.aliases,
                     "Channel alias map (FROM TO per line)")
      ->check(CLI::ExistingFile);

  TrainArgs tr;
  CLI::App* c_tr =
      app.add_subcommand("train", "Fit one classifier on a whole container");
  c_tr->add_option("--in", tr.in, "Epoch container")
      ->required()
      ->check(CLI::ExistingFile);
  c_tr->add_option("--out", tr.out, "Model output path")->required();
  c_tr->add_option("--family", tr.family, "bayes_lda, svm, or lasso_glm")
      ->required();
  c_tr->add_option("--montage", tr.montage, "Montage (I, II, III)")
      ->required();
  c_tr->add_option("--hyper", tr.hyper,
                   "Family hyperparameter (shrinkage, C, or lambda); "
                   "omit for defaults");

  EvaluateArgs ev;
  CLI::App* c_ev = app.add_subcommand(
      "evaluate", "Cross-validated sequence accuracy");
  c_ev->add_option("--in", ev.in, "Epoch container")
      ->required()
      ->check(CLI::ExistingFile);
  c_ev->add_option("--family", ev.family, "bayes_lda, svm, or lasso_glm")
      ->required();
  c_ev->add_option("--montage", ev.montage, "Montage (I, II, III)")
      ->required();
  c_ev->add_option("--trials", ev.trials, "Trials averaged per decision");
  c_ev->add_option("--k", ev.k, "Fold count");
  c_ev->add_option("--seed", ev.seed, "Fold shuffle seed")->required();
  c_ev->add_option("--hyper", ev.hyper, "Family hyperparameter");

  SweepArgs sw;
  CLI::App* c_sw = app.add_subcommand(
      "sweep", "Accuracy curves over trial counts and montages");
  c_sw->add_option("--in", sw.in, "Epoch container")
      ->required()
      ->check(CLI::ExistingFile);
  c_sw->add_option("--family", sw.family, "bayes_lda, svm, or lasso_glm")
      ->required();
  c_sw->add_option("--montage", sw.montages,
                   "Montage list, e.g. I,II,III");
  c_sw->add_option("--trials", sw.trials, "Trial counts, e.g. 2,5,10")
      ->delimiter(',');
  c_sw->add_option("--k", sw.k, "Fold count");
  c_sw->add_option("--seed", sw.seed, "Fold shuffle seed")->required();
  c_sw->add_option("--tag", sw.tag, "Dataset tag for CSV columns");
  c_sw->add_option("--outdir", sw.outdir, "Output directory")->required();
  c_sw->add_option("--hyper", sw.hyper, "Family hyperparameter");

  ReportArgs rep;
  CLI::App* c_rep = app.add_subcommand(
      "report", "Merge sweep tables and compare against reference anchors");
  c_rep->add_option("--in", rep.inputs, "table_*.csv files to merge")
      ->delimiter(',');
  c_rep->add_option("--outdir", rep.outdir, "Output directory")->required();
  c_rep->add_flag("--reference", rep.reference,
                  "Write summary.txt against the published anchors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (c_gen->parsed()) run_generate(gen);
    if (c_pre->parsed()) run_preprocess(pre);
    if (c_conv->parsed()) run_convert(conv);
    if (c_tr->parsed()) run_train(tr);
    if (c_ev->parsed()) run_evaluate(ev);
    if (c_sw->parsed()) run_sweep(sw);
    if (c_rep->parsed()) run_report(rep);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
