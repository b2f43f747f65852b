#pragma once

#include <stdexcept>
#include <string>

namespace wmt {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An operation was called outside its domain (non-monic input, ell < n, ...).
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A descriptor failed schema or consistency validation. `where` is a field path.
class DescriptorError : public Error {
public:
  DescriptorError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const { return where_; }

private:
  std::string where_;
};

/// An internal cross-check between two independent routes disagreed.
class AssertionFailure : public Error {
public:
  using Error::Error;
};

}  // namespace wmt
