#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdsim {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class OrderingViolation : public Error {
 public:
  explicit OrderingViolation(std::string inequality)
      : Error("payoff ordering violated: " + inequality), inequality_(std::move(inequality)) {}
  const std::string& inequality() const noexcept { return inequality_; }

 private:
  std::string inequality_;
};

class PopulationTooSmall : public Error {
 public:
  explicit PopulationTooSmall(std::size_t n)
      : Error("population needs at least 2 members, got " + std::to_string(n)) {}
};

class WrongComposition : public Error {
 public:
  using Error::Error;
};

class GridTooSmall : public Error {
 public:
  GridTooSmall(std::size_t w, std::size_t h)
      : Error("grid must be at least 3x3, got " + std::to_string(w) + "x" + std::to_string(h)) {}
};

class CountMismatch : public Error {
 public:
  using Error::Error;
};

class GridTooSmallForRings : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  EmptyBatch() : Error("cannot aggregate an empty batch") {}
};

class ParseError : public Error {
 public:
  ParseError(std::string location, const std::string& what)
      : Error("parse error at " + location + ": " + what), location_(std::move(location)) {}
  const std::string& location() const noexcept { return location_; }

 private:
  std::string location_;
};

class ValidationError : public Error {
 public:
  ValidationError(std::string field, std::string reason)
      : Error("invalid " + field + ": " + reason), field_(std::move(field)), reason_(std::move(reason)) {}
  const std::string& field() const noexcept { return field_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string field_;
  std::string reason_;
};

class IoError : public Error {
 public:
  IoError(std::string path, const std::string& what)
      : Error("i/o error on " + path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class FormatError : public Error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : Error("snapshot format error on line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace pdsim
