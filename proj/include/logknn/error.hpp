#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace logknn {

// Error tagged with the pipeline phase it came from. The CLI renders it as
// "error [phase]: message" and exits nonzero.
class Error : public std::runtime_error {
public:
  Error(std::string phase, const std::string& message)
      : std::runtime_error(message), phase_(std::move(phase)) {}

  const std::string& phase() const noexcept { return phase_; }

private:
  std::string phase_;
};

}  // namespace logknn
