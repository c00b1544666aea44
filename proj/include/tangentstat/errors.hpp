#ifndef TANGENTSTAT_ERRORS_HPP
#define TANGENTSTAT_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tangentstat {

/// Failure categories raised by the numerical modules.
enum class ErrorCode {
  domain,                   // non-finite or malformed input
  precondition,             // violated operation precondition
  numerical,                // non-finite intermediate (e.g. bracket partials)
  blow_up,                  // trajectory left the finite range
  empty_shell,              // energy below the potential minimum
  unsupported,              // method/potential combination not available
  accuracy,                 // quadrature refinement limit reached
  undefined_entropy,        // Omega = 0
  nonphysical_temperature,  // dS/dU <= 0
  fit,                      // histogram fit could not be formed
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::numerical: return "numerical";
    case ErrorCode::blow_up: return "blow_up";
    case ErrorCode::empty_shell: return "empty_shell";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::accuracy: return "accuracy";
    case ErrorCode::undefined_entropy: return "undefined_entropy";
    case ErrorCode::nonphysical_temperature: return "nonphysical_temperature";
    case ErrorCode::fit: return "fit";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when an integration step produces a non-finite coordinate.
class BlowUpError : public Error {
 public:
  BlowUpError(double tau, std::vector<double> q, std::vector<double> qtilde)
      : Error(ErrorCode::blow_up, "non-finite state at tau=" + std::to_string(tau)),
        tau_(tau),
        q_(std::move(q)),
        qtilde_(std::move(qtilde)) {}

  [[nodiscard]] double tau() const noexcept { return tau_; }
  [[nodiscard]] const std::vector<double>& q() const noexcept { return q_; }
  [[nodiscard]] const std::vector<double>& qtilde() const noexcept { return qtilde_; }

 private:
  double tau_;
  std::vector<double> q_;
  std::vector<double> qtilde_;
};

namespace detail {

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace detail
}  // namespace tangentstat

#endif  // TANGENTSTAT_ERRORS_HPP
