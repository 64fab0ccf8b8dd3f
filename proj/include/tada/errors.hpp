#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tada {

enum class ErrorCode {
  domain,            // argument outside the mathematical domain of an operation
  invalid_argument,  // malformed input (sizes, counts, options)
  all_zero,          // tempered update collapsed every weight to zero
  overflow,          // a weight hit the +inf sentinel (t > 1)
  collinear,         // projection at t = 0 with u collinear to q
  no_mixed_signs,    // projection minimum at +/- infinity
  edge_saturated,    // |rho| beyond the saturation cap
  degenerate_hypothesis,
  single_class,
  parse,
  io,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every module of the library. The code identifies the
/// failure class so callers (the experiment harness in particular) can
/// record it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tada
