#ifndef MICA_ERROR_HPP
#define MICA_ERROR_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mica {

/// Bad input or configuration supplied by the caller.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A text file (CoNLL or model) could not be read; carries the 1-based line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace mica

#endif  // MICA_ERROR_HPP
