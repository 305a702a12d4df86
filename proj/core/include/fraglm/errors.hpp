#pragma once

#include <stdexcept>
#include <string>

namespace fraglm {

// Failure categories used across the library. Each maps to a process exit
// code at the CLI boundary: invalid input (2), numeric failure (3),
// insufficient data (4).
enum class errc {
  invalid_argument,
  empty_support,
  incomplete_data,
  degenerate_spectrum,
  singular_design,
  coverage,
  insufficient_data,
  numeric,
  configuration,
};

class error : public std::runtime_error {
 public:
  error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}

  errc kind() const noexcept { return kind_; }

  int exit_code() const noexcept {
    switch (kind_) {
      case errc::invalid_argument:
      case errc::empty_support:
      case errc::incomplete_data:
      case errc::configuration:
        return 2;
      case errc::degenerate_spectrum:
      case errc::singular_design:
      case errc::numeric:
        return 3;
      case errc::coverage:
      case errc::insufficient_data:
        return 4;
    }
    return 3;
  }

 private:
  errc kind_;
};

[[noreturn]] inline void raise(errc kind, const std::string& msg) { throw error(kind, msg); }

// Rethrows a pipeline stage failure with the stage name prepended.
[[noreturn]] inline void rethrow_staged(const error& e, const std::string& stage) {
  throw error(e.kind(), stage + ": " + e.what());
}

}  // namespace fraglm
