#pragma once

#include <stdexcept>
#include <string>

namespace pircache {

// A cache set larger than floor(mu*K*L).
class BudgetViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Subfile length incompatible with the n^K block structure.
class InvalidLength : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A query, answer or link that the protocol cannot resolve.
class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pircache
