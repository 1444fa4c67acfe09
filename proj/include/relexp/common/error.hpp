#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace relexp {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes, sizes or parameters that cannot be honored.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidSceneError : public Error {
 public:
  using Error::Error;
};

class InvalidSelectionError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Loss became non-finite while training.
class TrainingError : public Error {
 public:
  TrainingError(int epoch, std::size_t batch, const std::string& what);

  int epoch() const { return epoch_; }
  std::size_t batch() const { return batch_; }

 private:
  int epoch_;
  std::size_t batch_;
};

// Syntax error in Prolog-style text. Line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  int column_;
  std::string message_;
};

}  // namespace relexp
