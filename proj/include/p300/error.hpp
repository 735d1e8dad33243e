#pragma once

#include <stdexcept>
#include <string>

namespace p300 {

// Base class for every domain error raised by this library. The CLI maps
// these to exit code 1; any other exception escaping the library is a bug.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct MissingChannel : Error {
  std::string label;
  explicit MissingChannel(const std::string& l)
      : Error("missing channel: " + l), label(l) {}
};

struct InvalidBand : Error {
  explicit InvalidBand(const std::string& msg) : Error("invalid band: " + msg) {}
};

struct UpsampleUnsupported : Error {
  UpsampleUnsupported(double from_hz, double to_hz)
      : Error("cannot resample " + std::to_string(from_hz) + " Hz up to " +
              std::to_string(to_hz) + " Hz") {}
};

struct EmptyInput : Error {
  explicit EmptyInput(const std::string& what) : Error("empty input: " + what) {}
};

struct ShortEpoch : Error {
  explicit ShortEpoch(const std::string& msg) : Error("short epoch: " + msg) {}
};

struct SingularCovariance : Error {
  explicit SingularCovariance(const std::string& msg)
      : Error("singular covariance: " + msg) {}
};

struct DegenerateClass : Error {
  explicit DegenerateClass(const std::string& msg)
      : Error("degenerate class: " + msg) {}
};

struct DimensionMismatch : Error {
  DimensionMismatch(long expected, long got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
};

struct NonConvergence : Error {
  long iterations;
  explicit NonConvergence(long iters, const std::string& what)
      : Error(what + " did not converge after " + std::to_string(iters) +
              " iterations"),
        iterations(iters) {}
};

struct UnknownFamily : Error {
  explicit UnknownFamily(const std::string& tag)
      : Error("unknown classifier family: " + tag) {}
};

struct TooFewSequences : Error {
  TooFewSequences(std::size_t n, int k)
      : Error("need at least " + std::to_string(k) + " sequences for " +
              std::to_string(k) + "-fold plan, got " + std::to_string(n)) {}
};

struct IncompleteSequence : Error {
  explicit IncompleteSequence(const std::string& msg)
      : Error("incomplete sequence: " + msg) {}
};

struct EmptyRequest : Error {
  explicit EmptyRequest(const std::string& what)
      : Error("empty request: " + what) {}
};

struct MalformedSpellerBlock : Error {
  explicit MalformedSpellerBlock(const std::string& msg)
      : Error("malformed speller block: " + msg) {}
};

struct NonMonotoneEstimate : Error {
  explicit NonMonotoneEstimate(const std::string& msg)
      : Error("non-monotone estimate: " + msg) {}
};

struct FormatVersionUnsupported : Error {
  explicit FormatVersionUnsupported(const std::string& msg)
      : Error("unsupported format version: " + msg) {}
};

struct CountMismatch : Error {
  explicit CountMismatch(const std::string& msg)
      : Error("count mismatch: " + msg) {}
};

struct TruncatedPayload : Error {
  explicit TruncatedPayload(const std::string& msg)
      : Error("truncated payload: " + msg) {}
};

struct SchemaMismatch : Error {
  std::string field;
  explicit SchemaMismatch(const std::string& f, const std::string& detail = "")
      : Error("schema mismatch: field '" + f + "'" +
              (detail.empty() ? "" : ": " + detail)),
        field(f) {}
};

struct IoError : Error {
  explicit IoError(const std::string& msg) : Error("io error: " + msg) {}
};

}  // namespace p300
