#ifndef EDGECLOUD_ERRORS_HPP
#define EDGECLOUD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace edgecloud {

// Error taxonomy mirrors the CLI exit codes: schema -> 2, infeasible -> 3,
// numeric -> 4. Anything else escaping the C API is reported as numeric.
class Error : public std::runtime_error {
 public:
  enum class Kind { schema, infeasible, numeric };

  Error(Kind kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& msg) : Error(Kind::schema, msg) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(Kind::infeasible, msg) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(Kind::numeric, msg) {}
};

// Perturbation formulas are valid only for eigenvalues separated by more than
// the certified eigengap floor; callers can catch this specifically.
class DegeneracyError : public NumericError {
 public:
  explicit DegeneracyError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace edgecloud

#endif
