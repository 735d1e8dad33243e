#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "p300/dataset.hpp"
#include "p300/montage.hpp"

namespace p300 {

// The feature vector is always 32 samples per electrode: epochs are 1000 ms
// and the pipeline resamples to 32 Hz.
inline constexpr int kFeatureTimeSamples = 32;
inline constexpr double kFeatureRateHz = 32.0;

struct BandpassSpec {
  int order = 3;
  double low_hz = 1.0;
  double high_hz = 12.0;
  double sample_rate_hz = 0.0;
};

// Transfer-function coefficients b(z)/a(z), a[0] normalized to 1.
struct IIRCoefficients {
  Eigen::VectorXd b;
  Eigen::VectorXd a;
  double sample_rate_hz = 0.0;
};

struct WinsorizeSpec {
  double lower_pct = 10.0;
  double upper_pct = 90.0;
};

// One preprocessed epoch, flattened electrode-major: electrode 0's 32 time
// samples first, then electrode 1's, and so on. Every value is in [-1, 1].
struct FeatureVector {
  Eigen::VectorXd values;
  int n_time = kFeatureTimeSamples;
  std::vector<std::string> channel_labels;  // electrode order of the blocks
  bool label = false;                       // true = P300 present (target)
  int stimulus_class = 0;
  int run_id = 0;
  int trial_index = 0;
  StimulusGroup group = StimulusGroup::kNone;

  int n_electrodes() const { return static_cast<int>(channel_labels.size()); }
};

// Digital Butterworth bandpass of analog order `spec.order` (2*order poles
// after the lowpass-to-bandpass transform), designed by mapping the analog
// prototype through the bilinear transform with frequency pre-warping.
IIRCoefficients design_butterworth_bandpass(const BandpassSpec& spec);

// H(e^{j 2 pi f / fs}) of the coefficient polynomials, Horner evaluation.
std::complex<double> frequency_response(const IIRCoefficients& coeffs,
                                        double freq_hz);

// Causal direct-form-II-transposed application with zero initial conditions.
// Output length equals input length.
Eigen::VectorXd filter_signal(const Eigen::Ref<const Eigen::VectorXd>& x,
                              const IIRCoefficients& coeffs);

// Integer ratios keep every k-th sample starting at index 0; other ratios
// linearly interpolate at the target sample times. Output length is
// floor(len * to_hz / from_hz). to_hz > from_hz is refused.
Eigen::VectorXd resample_to(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double from_hz, double to_hz);

// Percentile of x at `pct`, taken as the order statistic nearest to index
// pct/100 * (n-1). Clipping to order statistics keeps winsorize exactly
// idempotent, which interpolated percentiles do not.
double percentile(const Eigen::Ref<const Eigen::VectorXd>& x, double pct);

// Clips every value into [p_lower, p_upper] of the input's own distribution.
Eigen::VectorXd winsorize(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const WinsorizeSpec& spec = {});

// Affine map sending min -> -1 and max -> +1; a constant input maps to zeros.
Eigen::VectorXd normalize_unit_range(const Eigen::Ref<const Eigen::VectorXd>& x);

// The full per-epoch pipeline: montage selection, then per channel
// filter -> resample to 32 Hz -> winsorize -> normalize, concatenated
// electrode-major. band.sample_rate_hz of 0 means "use the epoch's rate".
FeatureVector preprocess_epoch(const Epoch& epoch,
                               const ElectrodeMontage& montage,
                               const BandpassSpec& band = {},
                               const WinsorizeSpec& wspec = {});

// Block-gathers the montage's electrodes out of a feature vector computed on
// a channel superset. Throws MissingChannel if an electrode is absent.
FeatureVector select_montage(const FeatureVector& fv,
                             const ElectrodeMontage& montage);

}  // namespace p300
