#include "tada/errors.hpp"

namespace tada {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return "domain";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::all_zero: return "all_zero";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::collinear: return "collinear";
    case ErrorCode::no_mixed_signs: return "no_mixed_signs";
    case ErrorCode::edge_saturated: return "edge_saturated";
    case ErrorCode::degenerate_hypothesis: return "degenerate_hypothesis";
    case ErrorCode::single_class: return "single_class";
    case ErrorCode::parse: return "parse";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

}  // namespace tada
