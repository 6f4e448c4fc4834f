#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace calabi {

/// Invalid domain parameters, aliased wavevectors, mismatched fields.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A metric failed the positivity test: the potential left the Kähler cone.
class NotKahlerError : public std::runtime_error {
 public:
  NotKahlerError(double min_eigenvalue, std::size_t point);

  double min_eigenvalue() const noexcept { return min_eigenvalue_; }
  std::size_t point() const noexcept { return point_; }

 private:
  double min_eigenvalue_;
  std::size_t point_;
};

}  // namespace calabi
