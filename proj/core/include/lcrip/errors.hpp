#pragma once

#include <stdexcept>
#include <string>

namespace lcrip {

/// An exact enumeration would exceed its configured evaluation budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap.
class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lcrip
