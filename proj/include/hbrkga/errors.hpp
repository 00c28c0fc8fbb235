#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hbrkga {

/// Caller violated a precondition (bad index, invalid config, out-of-order record).
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A numeric argument is outside the domain of the operation.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// The objective failed while evaluating a trial.
class EvaluationError : public std::runtime_error {
  public:
    EvaluationError(const std::string& what, std::size_t trial_index)
        : std::runtime_error("trial " + std::to_string(trial_index) + ": " + what),
          trial_index_(trial_index) {}

    [[nodiscard]] std::size_t trial_index() const noexcept { return trial_index_; }

  private:
    std::size_t trial_index_;
};

/// Model training diverged.
class TrainingError : public std::runtime_error {
  public:
    TrainingError(const std::string& what, std::size_t epoch)
        : std::runtime_error("epoch " + std::to_string(epoch) + ": " + what), epoch_(epoch) {}

    [[nodiscard]] std::size_t epoch() const noexcept { return epoch_; }

  private:
    std::size_t epoch_;
};

/// Malformed configuration or space file. Line is 1-based, 0 when not line-specific.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(const std::string& what, std::size_t line = 0)
        : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
          line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

} // namespace hbrkga
