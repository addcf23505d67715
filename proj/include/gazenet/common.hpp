#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gazenet {

// Error hierarchy. Every failure surfaced by the library derives from Error so
// the CLI can map it to a non-zero exit status with a readable message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IngestError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : Error(file + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreprocessError : public Error {
 public:
  using Error::Error;
};

class SegmentError : public Error {
 public:
  using Error::Error;
};

class ModelFault : public Error {
 public:
  using Error::Error;
};

class MetricError : public Error {
 public:
  using Error::Error;
};

class DependencyError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Seeds and random streams
// ---------------------------------------------------------------------------

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

// Stable derived seed: master seed mixed with an ordered list of tags.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::string_view> tags);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag);

// Portable random stream. The engine is std::mt19937_64; the mappings to
// uniform reals, indices and normals are defined here (not by the standard
// library distributions) so streams are identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Text helpers shared by the CSV readers/writers
// ---------------------------------------------------------------------------

// Shortest representation that parses back to the identical double.
std::string format_double(double v);
double parse_double(std::string_view s, const std::string& file, std::size_t line);
long long parse_int(std::string_view s, const std::string& file, std::size_t line);
std::vector<std::string_view> split_csv_line(std::string_view line);
std::string_view trim(std::string_view s);
std::string hex64(std::uint64_t v);

// Reads a whole file; throws IngestError if it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

}  // namespace gazenet
