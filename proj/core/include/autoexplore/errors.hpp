#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace autoexplore {

/// Raised when an online procedure hits its sample cap before its stopping
/// condition holds. Usually means the induced chain mixes very slowly or some
/// required state-action pair has near-zero visitation.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::int64_t budget, const std::string& where)
      : std::runtime_error(where + ": sample budget of " + std::to_string(budget) +
                           " exhausted"),
        budget_(budget) {}

  std::int64_t budget() const noexcept { return budget_; }

 private:
  std::int64_t budget_;
};

/// The policy-induced chain has more than one closed communicating class.
class NotIrreducible : public std::runtime_error {
 public:
  explicit NotIrreducible(const std::string& what) : std::runtime_error(what) {}
};

class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

class BisectionFailed : public NumericError {
 public:
  explicit BisectionFailed(const std::string& what) : NumericError(what) {}
};

class SingularSystem : public NumericError {
 public:
  explicit SingularSystem(const std::string& what) : NumericError(what) {}
};

}  // namespace autoexplore
