#include "bridgenav/error.hpp"

namespace bridgenav {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput: return "invalid input";
    case ErrorCode::kDegenerate: return "degenerate geometry";
    case ErrorCode::kUnreachable: return "unreachable";
    case ErrorCode::kBudgetExhausted: return "budget exhausted";
    case ErrorCode::kCollision: return "collision";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kUnschedulable: return "unschedulable";
  }
  return "unknown";
}

}  // namespace bridgenav
