#ifndef GMMHMM_ERROR_HPP
#define GMMHMM_ERROR_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace gmmhmm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A covariance that is singular, asymmetric or not positive definite, or a
/// training run that collapsed into an unusable model.
class ModelDegeneracyError : public Error {
 public:
  explicit ModelDegeneracyError(const std::string& what,
                                std::optional<std::size_t> state = std::nullopt,
                                std::optional<std::size_t> component = std::nullopt)
      : Error(what), state_(state), component_(component) {}

  std::optional<std::size_t> state() const { return state_; }
  std::optional<std::size_t> component() const { return component_; }

 private:
  std::optional<std::size_t> state_;
  std::optional<std::size_t> component_;
};

/// Observation or parameter outside the model's domain (symbol >= K,
/// dimension mismatch, non-finite value, malformed probability vector...).
class InputDomainError : public Error {
 public:
  explicit InputDomainError(const std::string& what,
                            std::optional<std::size_t> position = std::nullopt)
      : Error(what), position_(position) {}

  std::optional<std::size_t> position() const { return position_; }

 private:
  std::optional<std::size_t> position_;
};

/// Input shorter than the minimum the operation needs.
class TooShortInputError : public Error {
 public:
  TooShortInputError(const std::string& what, std::size_t actual, std::size_t required)
      : Error(what), actual_(actual), required_(required) {}

  std::size_t actual() const { return actual_; }
  std::size_t required() const { return required_; }

 private:
  std::size_t actual_;
  std::size_t required_;
};

/// Evaluation that cannot be carried out (single-class AUC, too few samples).
class EvaluationError : public Error {
 public:
  using Error::Error;
};

/// Malformed feature, vocabulary or model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace gmmhmm

#endif  // GMMHMM_ERROR_HPP
