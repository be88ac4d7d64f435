#pragma once

#include <stdexcept>
#include <string>

namespace ergolab {

/// A well-formed request that has no answer in the finite model
/// (infeasible tower, search cap exceeded, orbit leaving the tower).
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ergolab
