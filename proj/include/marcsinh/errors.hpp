#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace marcsinh {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A class with zero samples where every class needs at least one.
class EmptyClass : public std::invalid_argument {
 public:
  EmptyClass() : std::invalid_argument("empty class") {}
};

class SingleClass : public std::invalid_argument {
 public:
  SingleClass() : std::invalid_argument("single class: at least two classes are required") {}
};

// The SMO solver hit its iteration cap with KKT violations above tolerance.
class NotConverged : public std::runtime_error {
 public:
  explicit NotConverged(std::size_t iterations)
      : std::runtime_error("did not converge after " + std::to_string(iterations) + " iterations"),
        iterations_(iterations) {}

  std::size_t iterations() const noexcept { return iterations_; }

 private:
  std::size_t iterations_;
};

// Non-finite loss during MLP training.
class TrainingDiverged : public std::runtime_error {
 public:
  explicit TrainingDiverged(std::size_t epoch)
      : std::runtime_error("training diverged at epoch " + std::to_string(epoch)), epoch_(epoch) {}

  std::size_t epoch() const noexcept { return epoch_; }

 private:
  std::size_t epoch_;
};

// Malformed input files, manifests and missing data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace marcsinh
