#ifndef SMOOTHREP_ERRORS_HPP
#define SMOOTHREP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace smoothrep {

// Exit-code buckets used by the CLI: usage errors (2), budget/search
// exhaustion (3), and mathematical failures (1).
enum class ErrorKind {
  usage,
  not_invertible,
  non_residue,
  not_representable,
  not_found,
  verification_failure,
  search_exhausted,
  factor_budget,
  cap_exceeded,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

struct NotInvertibleError : Error {
  explicit NotInvertibleError(const std::string& what)
      : Error(ErrorKind::not_invertible, what) {}
};

struct NonResidueError : Error {
  explicit NonResidueError(const std::string& what)
      : Error(ErrorKind::non_residue, what) {}
};

struct NotRepresentableError : Error {
  explicit NotRepresentableError(const std::string& what)
      : Error(ErrorKind::not_representable, what) {}
};

struct VerificationFailureError : Error {
  explicit VerificationFailureError(const std::string& what)
      : Error(ErrorKind::verification_failure, what) {}
};

struct SearchExhaustedError : Error {
  explicit SearchExhaustedError(const std::string& what)
      : Error(ErrorKind::search_exhausted, what) {}
};

struct CapExceededError : Error {
  explicit CapExceededError(const std::string& what)
      : Error(ErrorKind::cap_exceeded, what) {}
};

}  // namespace smoothrep

#endif  // SMOOTHREP_ERRORS_HPP
