#pragma once

#include <stdexcept>
#include <string>

namespace tactics {

// Raised for violated preconditions and malformed input data. Callers at the
// CLI/HTTP boundary translate it into exit codes and status codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A lookup of an id (team, player, session) that the receiver does not know.
class NotFound : public Error {
 public:
  using Error::Error;
};

#define TACTICS_CHECK(cond, msg)                 \
  do {                                           \
    if (!(cond)) throw ::tactics::Error(msg);    \
  } while (0)

}  // namespace tactics
