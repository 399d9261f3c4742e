#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ned {

/// Simulation state escaped the sane range; carries the first bad sample.
struct NumericInstability : std::runtime_error {
  std::size_t sample;
  explicit NumericInstability(std::size_t s)
      : std::runtime_error("numeric instability at sample " + std::to_string(s)), sample(s) {}
};

struct InsufficientExcitation : std::runtime_error {
  InsufficientExcitation() : std::runtime_error("commanded motion is constant, nothing to fit") {}
};

struct OptimizerDivergence : std::runtime_error {
  explicit OptimizerDivergence(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidWindow : std::runtime_error {
  explicit InvalidWindow(const std::string& what) : std::runtime_error(what) {}
};

struct ResolutionLimited : std::runtime_error {
  ResolutionLimited() : std::runtime_error("mean displacement below one encoder quantum") {}
};

struct UndefinedReference : std::runtime_error {
  UndefinedReference() : std::runtime_error("reference signal is constant, nrmse undefined") {}
};

struct DegenerateGeometry : std::runtime_error {
  explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

struct RejectedReset : std::runtime_error {
  RejectedReset() : std::runtime_error("reset rejected: violation still present") {}
};

struct NoFeasibleCandidate : std::runtime_error {
  NoFeasibleCandidate() : std::runtime_error("no candidate limit set produced a valid simulation") {}
};

}  // namespace ned
