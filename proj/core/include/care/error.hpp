#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace care {

enum class ErrorKind {
  io,
  format,
  contract,
  argument,
  config,
  insufficient_data,
  degeneracy,
  no_consensus,
};

std::string_view to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Errors that mean "no transform could be fitted" rather than a bug or bad input.
  bool is_fit_failure() const noexcept {
    return kind_ == ErrorKind::insufficient_data ||
           kind_ == ErrorKind::degeneracy || kind_ == ErrorKind::no_consensus;
  }

 private:
  ErrorKind kind_;
};

}  // namespace care
