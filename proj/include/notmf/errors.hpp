#ifndef NOTMF_ERRORS_HPP
#define NOTMF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace notmf {

// Error classes double as CLI exit codes and C API status codes:
// parse = 2, dimension/config = 3, numerical = 4.
enum class ErrorClass : int {
  parse = 2,
  dimension = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

// Malformed input files: ragged rows, non-numeric cells, missing header.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorClass::parse, what) {}
};

// Incompatible shapes, out-of-range indices, invalid configuration.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorClass::dimension, what) {}
};

// Singular systems, non-finite values, solver divergence.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorClass::numerical, what) {}
};

}  // namespace notmf

#endif
