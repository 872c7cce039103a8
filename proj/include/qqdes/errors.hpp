#pragma once

#include <stdexcept>
#include <string>

namespace qqdes {

/// An information matrix required by the criterion is singular or indefinite.
/// matrix_index identifies which block failed: 0 for the joint (product
/// weight) block, 1 for the success block, 2 for the failure block.
class SingularDesign : public std::runtime_error {
public:
  SingularDesign(int matrix_index, const std::string& what)
      : std::runtime_error(what), matrix_index_(matrix_index) {}
  int matrix_index() const { return matrix_index_; }

private:
  int matrix_index_;
};

/// No nonsingular design of the requested size exists for the model on the
/// given candidate set (or too many sub-searches failed).
class InfeasibleModel : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Repeated draws failed to produce a usable design.
class SamplingFailed : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qqdes
