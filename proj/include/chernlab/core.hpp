#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace chernlab {

using cplx = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Errors carry a short machine label ("gapless", "resonant energy", ...)
// so the CLI can report which contract was violated.
class Error : public std::runtime_error {
 public:
  Error(std::string label, const std::string& what)
      : std::runtime_error(label + ": " + what), label_(std::move(label)) {}
  const std::string& label() const noexcept { return label_; }

 private:
  std::string label_;
};

inline void require(bool ok, const char* label, const std::string& msg) {
  if (!ok) throw Error(label, msg);
}

}  // namespace chernlab
