#pragma once

#include <stdexcept>
#include <string>

namespace polarseg {

// Base for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sizes of two related inputs disagree (K vs distances, mask shapes, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A point or value lies outside the region where the operation is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid configuration or argument value.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Contour failed validation (too few vertices, zero area, self-intersection).
class GeometryError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t byte_offset)
      : Error(what), byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace polarseg
