#ifndef OPRADIUS_ERRORS_HPP
#define OPRADIUS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace opradius {

// Base class for every failure this library reports on purpose.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class NotHermitian : public Error {
 public:
  explicit NotHermitian(const std::string& msg) : Error(msg) {}
};

class NotPSD : public Error {
 public:
  explicit NotPSD(const std::string& msg) : Error(msg) {}
};

class ConvergenceFailure : public Error {
 public:
  explicit ConvergenceFailure(const std::string& msg) : Error(msg) {}
};

// Quadrature node budget exhausted.
class NoConvergence : public ConvergenceFailure {
 public:
  explicit NoConvergence(const std::string& msg) : ConvergenceFailure(msg) {}
};

class DimensionMismatch : public Error {
 public:
  explicit DimensionMismatch(const std::string& msg) : Error(msg) {}
};

class InvalidTolerance : public Error {
 public:
  explicit InvalidTolerance(const std::string& msg) : Error(msg) {}
};

class WrongInputShape : public Error {
 public:
  explicit WrongInputShape(const std::string& msg) : Error(msg) {}
};

class ParameterOutOfRange : public Error {
 public:
  explicit ParameterOutOfRange(const std::string& msg) : Error(msg) {}
};

class NotApplicable : public Error {
 public:
  explicit NotApplicable(const std::string& msg) : Error(msg) {}
};

class InvalidSpec : public Error {
 public:
  explicit InvalidSpec(const std::string& msg) : Error(msg) {}
};

class IOFailure : public Error {
 public:
  explicit IOFailure(const std::string& msg) : Error(msg) {}
};

// Malformed input files (matrix JSON and friends).
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& msg) : Error(msg) {}
};

}  // namespace opradius

#endif
