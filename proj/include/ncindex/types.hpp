#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace ncindex {

using cplx = std::complex<double>;
using MatrixXc = Eigen::MatrixXcd;
using VectorXc = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
/// The constant 2*pi*i that every Chern-type normalization is expressed in.
inline const cplx kTwoPiI{0.0, 2.0 * std::numbers::pi};

}  // namespace ncindex
