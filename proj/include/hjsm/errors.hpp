#pragma once

#include <stdexcept>
#include <string>

namespace hjsm {

/// A numerical procedure failed (divergence, non-finite state, singularity).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A convergence-certificate hypothesis is violated.
class CertificateError : public std::runtime_error {
 public:
  explicit CertificateError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hjsm
