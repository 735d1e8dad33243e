#include "p300/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "p300/error.hpp"

namespace p300 {

namespace {

using cd = std::complex<double>;

// Expands prod (z - r_i) into monic polynomial coefficients, highest power
// first. Roots come in conjugate pairs, so the result is real up to rounding.
Eigen::VectorXd poly_from_roots(const std::vector<cd>& roots) {
  std::vector<cd> c{1.0};
  for (const cd& r : roots) {
    c.push_back(0.0);
    for (std::size_t k = c.size() - 1; k >= 1; --k) c[k] -= r * c[k - 1];
  }
  Eigen::VectorXd out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) out[static_cast<long>(i)] = c[i].real();
  return out;
}

void validate_band(const BandpassSpec& spec) {
  if (spec.order < 1) throw InvalidBand("order must be >= 1");
  if (!(spec.sample_rate_hz > 0.0)) throw InvalidBand("sample rate must be positive");
  if (!(0.0 < spec.low_hz && spec.low_hz < spec.high_hz &&
        spec.high_hz < spec.sample_rate_hz / 2.0)) {
    throw InvalidBand("need 0 < low < high < fs/2, got [" +
                      std::to_string(spec.low_hz) + ", " +
                      std::to_string(spec.high_hz) + "] at fs " +
                      std::to_string(spec.sample_rate_hz));
  }
}

}  // namespace

IIRCoefficients design_butterworth_bandpass(const BandpassSpec& spec) {
  validate_band(spec);
  const int n = spec.order;
  const double fs = spec.sample_rate_hz;
  const double fs2 = 2.0 * fs;
  const double pi = std::numbers::pi;

  // Pre-warp the band edges so the bilinear transform lands them exactly.
  const double w1 = fs2 * std::tan(pi * spec.low_hz / fs);
  const double w2 = fs2 * std::tan(pi * spec.high_hz / fs);
  const double w0 = std::sqrt(w1 * w2);
  const double bw = w2 - w1;

  // Analog lowpass prototype: n poles on the unit circle's left half.
  std::vector<cd> analog_poles;
  analog_poles.reserve(2 * static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double theta = pi * (2.0 * k + n + 1.0) / (2.0 * n);
    const cd p(std::cos(theta), std::sin(theta));
    // Lowpass-to-bandpass: each prototype pole becomes the root pair of
    // s^2 - p*bw*s + w0^2.
    const cd pb = p * bw;
    const cd disc = std::sqrt(pb * pb - 4.0 * w0 * w0);
    analog_poles.push_back((pb + disc) / 2.0);
    analog_poles.push_back((pb - disc) / 2.0);
  }

  // Bilinear map z = (2fs + s) / (2fs - s). The n analog zeros at s = 0 land
  // on z = +1 and the n zeros at infinity on z = -1. The gain factor follows
  // from substituting the map into k * prod(s - zero) / prod(s - pole).
  std::vector<cd> zpoles;
  cd denom = 1.0;
  for (const cd& s : analog_poles) {
    const cd zp = (fs2 + s) / (fs2 - s);
    if (std::abs(zp) >= 1.0) {
      throw InvalidBand("designed filter is unstable (pole at |z| = " +
                        std::to_string(std::abs(zp)) + ")");
    }
    zpoles.push_back(zp);
    denom *= (fs2 - s);
  }
  const double k_bp = std::pow(bw, n);
  const cd k_z = k_bp * std::pow(cd(fs2, 0.0), n) / denom;

  std::vector<cd> zzeros;
  for (int k = 0; k < n; ++k) zzeros.push_back(1.0);
  for (int k = 0; k < n; ++k) zzeros.push_back(-1.0);

  IIRCoefficients coeffs;
  coeffs.a = poly_from_roots(zpoles);
  coeffs.b = poly_from_roots(zzeros) * k_z.real();
  coeffs.sample_rate_hz = fs;

  // Sanity check the passband: unit-ish gain at the geometric band center.
  const double mid = std::sqrt(spec.low_hz * spec.high_hz);
  const double gain = std::abs(frequency_response(coeffs, mid));
  if (gain < 0.7 || gain > 1.3) {
    throw InvalidBand("mid-band gain " + std::to_string(gain) +
                      " outside [0.7, 1.3]");
  }
  return coeffs;
}

std::complex<double> frequency_response(const IIRCoefficients& coeffs,
                                        double freq_hz) {
  const double omega = 2.0 * std::numbers::pi * freq_hz / coeffs.sample_rate_hz;
  const cd zinv = std::exp(cd(0.0, -omega));
  // H(z) = sum b_k z^-k / sum a_k z^-k, evaluated by Horner in z^-1 from the
  // highest lag down.
  cd num = 0.0, den = 0.0;
  for (long i = coeffs.b.size() - 1; i >= 0; --i) num = num * zinv + coeffs.b[i];
  for (long i = coeffs.a.size() - 1; i >= 0; --i) den = den * zinv + coeffs.a[i];
  return num / den;
}

Eigen::VectorXd filter_signal(const Eigen::Ref<const Eigen::VectorXd>& x,
                              const IIRCoefficients& coeffs) {
  const long nb = coeffs.b.size();
  const long na = coeffs.a.size();
  const long nz = std::max(nb, na) - 1;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(nz + 1);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(nz + 1);
  b.head(nb) = coeffs.b;
  a.head(na) = coeffs.a;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(nz);
  Eigen::VectorXd y(x.size());
  for (long i = 0; i < x.size(); ++i) {
    const double xi = x[i];
    const double yi = b[0] * xi + (nz > 0 ? z[0] : 0.0);
    for (long j = 0; j < nz - 1; ++j) {
      z[j] = b[j + 1] * xi + z[j + 1] - a[j + 1] * yi;
    }
    if (nz > 0) z[nz - 1] = b[nz] * xi - a[nz] * yi;
    y[i] = yi;
  }
  return y;
}

Eigen::VectorXd resample_to(const Eigen::Ref<const Eigen::VectorXd>& x,
                            double from_hz, double to_hz) {
  if (!(from_hz > 0.0) || !(to_hz > 0.0)) {
    throw Error("sample rates must be positive");
  }
  if (to_hz > from_hz) throw UpsampleUnsupported(from_hz, to_hz);

  const long n_out =
      static_cast<long>(std::floor(static_cast<double>(x.size()) * to_hz / from_hz));
  Eigen::VectorXd y(n_out);

  const double ratio = from_hz / to_hz;
  const double k_int = std::round(ratio);
  if (std::abs(ratio - k_int) < 1e-12) {
    const long k = static_cast<long>(k_int);
    for (long i = 0; i < n_out; ++i) y[i] = x[i * k];
    return y;
  }
  for (long i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * ratio;
    const long lo = static_cast<long>(std::floor(pos));
    const long hi = std::min(lo + 1, static_cast<long>(x.size()) - 1);
    const double frac = pos - static_cast<double>(lo);
    y[i] = x[std::min(lo, static_cast<long>(x.size()) - 1)] * (1.0 - frac) +
           x[hi] * frac;
  }
  return y;
}

double percentile(const Eigen::Ref<const Eigen::VectorXd>& x, double pct) {
  if (x.size() == 0) throw EmptyInput("percentile");
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end());
  const double pos = pct / 100.0 * static_cast<double>(sorted.size() - 1);
  long idx = std::lround(pos);
  idx = std::clamp(idx, 0L, static_cast<long>(sorted.size()) - 1);
  return sorted[static_cast<std::size_t>(idx)];
}

Eigen::VectorXd winsorize(const Eigen::Ref<const Eigen::VectorXd>& x,
                          const WinsorizeSpec& spec) {
  if (x.size() == 0) throw EmptyInput("winsorize");
  if (!(0.0 <= spec.lower_pct && spec.lower_pct < spec.upper_pct &&
        spec.upper_pct <= 100.0)) {
    throw Error("winsorize percentiles must satisfy 0 <= lower < upper <= 100");
  }
  const double lo = percentile(x, spec.lower_pct);
  const double hi = percentile(x, spec.upper_pct);
  return x.cwiseMax(lo).cwiseMin(hi);
}

Eigen::VectorXd normalize_unit_range(const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() == 0) throw EmptyInput("normalize_unit_range");
  const double mn = x.minCoeff();
  const double mx = x.maxCoeff();
  if (mx == mn) return Eigen::VectorXd::Zero(x.size());
  return (2.0 * (x.array() - mn) / (mx - mn) - 1.0).matrix();
}

FeatureVector preprocess_epoch(const Epoch& epoch,
                               const ElectrodeMontage& montage,
                               const BandpassSpec& band,
                               const WinsorizeSpec& wspec) {
  BandpassSpec bs = band;
  if (bs.sample_rate_hz == 0.0) bs.sample_rate_hz = epoch.sample_rate_hz;
  if (bs.sample_rate_hz != epoch.sample_rate_hz) {
    throw InvalidBand("bandpass designed at " +
                      std::to_string(bs.sample_rate_hz) +
                      " Hz but epoch is sampled at " +
                      std::to_string(epoch.sample_rate_hz) + " Hz");
  }
  const IIRCoefficients coeffs = design_butterworth_bandpass(bs);
  const Epoch selected = select_montage(epoch, montage);

  FeatureVector fv;
  fv.channel_labels = montage.channels;
  fv.label = epoch.is_target;
  fv.stimulus_class = epoch.stimulus_class;
  fv.run_id = epoch.run_id;
  fv.trial_index = epoch.trial_index;
  fv.group = epoch.group;
  fv.values.resize(static_cast<long>(montage.n_channels()) * kFeatureTimeSamples);

  for (int ch = 0; ch < montage.n_channels(); ++ch) {
    Eigen::VectorXd x = selected.data.row(ch).transpose();
    x = filter_signal(x, coeffs);
    x = resample_to(x, epoch.sample_rate_hz, kFeatureRateHz);
    if (x.size() < kFeatureTimeSamples) {
      throw ShortEpoch("channel " + montage.channels[ch] + " yields " +
                       std::to_string(x.size()) + " samples, need " +
                       std::to_string(kFeatureTimeSamples));
    }
    x = x.head(kFeatureTimeSamples).eval();
    x = winsorize(x, wspec);
    x = normalize_unit_range(x);
    fv.values.segment(static_cast<long>(ch) * kFeatureTimeSamples,
                      kFeatureTimeSamples) = x;
  }
  return fv;
}

FeatureVector select_montage(const FeatureVector& fv,
                             const ElectrodeMontage& montage) {
  FeatureVector out;
  out.n_time = fv.n_time;
  out.channel_labels = montage.channels;
  out.label = fv.label;
  out.stimulus_class = fv.stimulus_class;
  out.run_id = fv.run_id;
  out.trial_index = fv.trial_index;
  out.group = fv.group;
  out.values.resize(static_cast<long>(montage.n_channels()) * fv.n_time);
  for (int i = 0; i < montage.n_channels(); ++i) {
    long src = -1;
    for (std::size_t j = 0; j < fv.channel_labels.size(); ++j) {
      if (fv.channel_labels[j] == montage.channels[i]) {
        src = static_cast<long>(j);
        break;
      }
    }
    if (src < 0) throw MissingChannel(montage.channels[i]);
    out.values.segment(static_cast<long>(i) * fv.n_time, fv.n_time) =
        fv.values.segment(src * fv.n_time, fv.n_time);
  }
  return out;
}

}  // namespace p300
