#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace linkdeg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Failure classes, used by the CLI to pick its exit code.
enum class ErrorClass : int {
  Precondition = 2,  // bad input or violated contract
  NotConverged = 3,  // a numerical routine did not reach its tolerance
  Internal = 4,      // invariant broken inside the library
};

/// All library errors carry a short machine-readable kind ("OutOfBall",
/// "NotConverged", ...) plus a human-readable message.
class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), cls_(cls), kind_(std::move(kind)) {}

  ErrorClass error_class() const { return cls_; }
  const std::string& kind() const { return kind_; }

 private:
  ErrorClass cls_;
  std::string kind_;
};

[[noreturn]] inline void fail_precondition(const std::string& kind, const std::string& message) {
  throw Error(ErrorClass::Precondition, kind, message);
}

[[noreturn]] inline void fail_not_converged(const std::string& kind, const std::string& message) {
  throw Error(ErrorClass::NotConverged, kind, message);
}

[[noreturn]] inline void fail_internal(const std::string& message) {
  throw Error(ErrorClass::Internal, "Internal", message);
}

/// FNV-1a 64-bit hash, used for the config hash in result records.
inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

/// Surface measure of the unit sphere S^k embedded in R^{k+1}.
double sphere_volume(int k);

}  // namespace linkdeg
