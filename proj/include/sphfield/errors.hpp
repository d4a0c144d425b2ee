#pragma once

#include <stdexcept>
#include <string>

namespace sphfield {

enum class ErrorKind {
  index,
  convention,
  domain,
  resolution,
  parse,
  consistency,
  sample_size,
  config,
  io,
  verification,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Binary/text decoding failure. offset is a byte offset for binary formats
// and a 1-based line number for text formats.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(ErrorKind::parse, what), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) throw Error(kind, what);
}

}  // namespace sphfield
