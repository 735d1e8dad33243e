#include <bit>
#include <cstdint>
#include <cstring>
#include <sstream>
#include <vector>

#include "p300/error.hpp"
#include "p300/io_util.hpp"
#include "p300/model_io.hpp"

namespace p300 {

namespace {

constexpr const char* kMagic = "p300model";
constexpr int kVersion = 1;

void push(std::vector<double>& out, const Eigen::VectorXd& v) {
  out.insert(out.end(), v.data(), v.data() + v.size());
}

void push(std::vector<double>& out, const Eigen::MatrixXd& m) {
  for (long r = 0; r < m.rows(); ++r) {
    for (long c = 0; c < m.cols(); ++c) out.push_back(m(r, c));
  }
}

std::string encode(const std::vector<double>& values) {
  std::string bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    bytes.append(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  return bytes;
}

std::vector<double> decode(const std::string& blob, std::size_t offset,
                           std::size_t count) {
  const std::size_t available = blob.size() - offset;
  if (available != count * 8) {
    throw TruncatedPayload("expected " + std::to_string(count * 8) +
                           " payload bytes, found " +
                           std::to_string(available));
  }
  std::vector<double> values(count);
  const char* cursor = blob.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits;
    std::memcpy(&bits, cursor, sizeof bits);
    cursor += sizeof bits;
    if constexpr (std::endian::native == std::endian::big) {
      bits = __builtin_bswap64(bits);
    }
    std::memcpy(&values[i], &bits, sizeof bits);
  }
  return values;
}

}  // namespace

void save_model(const TrainedClassifier& clf, const std::string& path) {
  const long d = clf.dim();
  std::vector<double> values;
  switch (clf.family) {
    case ClassifierFamily::kBayesLda: {
      const auto& m = std::get<BayesLdaModel>(clf.model);
      push(values, m.mu0);
      push(values, m.mu1);
      push(values, m.sigma_inv);
      values.push_back(m.log_priors[0]);
      values.push_back(m.log_priors[1]);
      values.push_back(m.shrinkage);
      break;
    }
    case ClassifierFamily::kLinearSvm: {
      const auto& m = std::get<LinearSvmModel>(clf.model);
      push(values, m.w);
      values.push_back(m.b);
      values.push_back(m.c);
      break;
    }
    case ClassifierFamily::kLassoGlm: {
      const auto& m = std::get<LassoGlmModel>(clf.model);
      values.push_back(m.beta0);
      push(values, m.beta);
      values.push_back(m.lambda);
      break;
    }
  }

  std::ostringstream header;
  header << kMagic << " " << kVersion << "\n";
  header << "family " << family_name(clf.family) << "\n";
  header << "dim " << d << "\n";
  header << "payload\n";
  write_file_atomic(path, std::move(header).str() + encode(values));
}

TrainedClassifier load_model(const std::string& path) {
  const std::string blob = read_file(path);

  std::size_t pos = 0;
  const auto next_line = [&](const std::string& what) {
    const std::size_t nl = blob.find('\n', pos);
    if (nl == std::string::npos) {
      throw Error("model file " + path + ": missing " + what);
    }
    std::string line = blob.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };

  {
    std::istringstream head(next_line("magic line"));
    std::string magic;
    int version = -1;
    head >> magic >> version;
    if (magic != kMagic) {
      throw FormatVersionUnsupported(path + " is not a " + kMagic + " file");
    }
    if (version != kVersion) {
      throw FormatVersionUnsupported("model version " +
                                     std::to_string(version) +
                                     " unsupported (expected 1)");
    }
  }

  std::string family_tag;
  {
    std::istringstream line(next_line("family line"));
    std::string key;
    line >> key >> family_tag;
    if (key != "family") throw Error("model file: expected family line");
  }
  long d = -1;
  {
    std::istringstream line(next_line("dim line"));
    std::string key;
    line >> key >> d;
    if (key != "dim" || d < 1) {
      throw Error("model file: expected positive dim");
    }
  }
  if (next_line("payload marker") != "payload") {
    throw Error("model file: expected 'payload'");
  }

  const ClassifierFamily family = family_from_name(family_tag);
  const std::size_t dim = static_cast<std::size_t>(d);
  TrainedClassifier clf;
  clf.family = family;
  switch (family) {
    case ClassifierFamily::kBayesLda: {
      const std::vector<double> v = decode(blob, pos, dim * dim + 2 * dim + 3);
      BayesLdaModel m;
      m.mu0 = Eigen::Map<const Eigen::VectorXd>(v.data(), d);
      m.mu1 = Eigen::Map<const Eigen::VectorXd>(v.data() + dim, d);
      m.sigma_inv.resize(d, d);
      std::size_t at = 2 * dim;
      for (long r = 0; r < d; ++r) {
        for (long c = 0; c < d; ++c) m.sigma_inv(r, c) = v[at++];
      }
      m.log_priors = {v[at], v[at + 1]};
      m.shrinkage = v[at + 2];
      m.weight = m.sigma_inv * (m.mu1 - m.mu0);
      m.bias = -0.5 * (m.mu1.dot(m.sigma_inv * m.mu1) -
                       m.mu0.dot(m.sigma_inv * m.mu0)) +
               m.log_priors[1] - m.log_priors[0];
      clf.model = std::move(m);
      break;
    }
    case ClassifierFamily::kLinearSvm: {
      const std::vector<double> v = decode(blob, pos, dim + 2);
      LinearSvmModel m;
      m.w = Eigen::Map<const Eigen::VectorXd>(v.data(), d);
      m.b = v[dim];
      m.c = v[dim + 1];
      clf.model = std::move(m);
      break;
    }
    case ClassifierFamily::kLassoGlm: {
      const std::vector<double> v = decode(blob, pos, dim + 2);
      LassoGlmModel m;
      m.beta0 = v[0];
      m.beta = Eigen::Map<const Eigen::VectorXd>(v.data() + 1, d);
      m.lambda = v[dim + 1];
      clf.model = std::move(m);
      break;
    }
  }
  return clf;
}

}  // namespace p300
