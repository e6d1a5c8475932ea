#pragma once

#include <complex>
#include <cstdint>

#include <Eigen/Dense>

namespace daqc {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using Mat2 = Eigen::Matrix2cd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr cplx I_UNIT{0.0, 1.0};

// Shared tolerances.
inline constexpr double TOL_VALID = 1e-10;
inline constexpr double TOL_UNITARY = 1e-9;
inline constexpr double TOL_NORM_ITER = 1e-8;

// Sign of the exponent used when turning a generator into a unitary.
// Minus is the canonical exp(-iHt); Plus reproduces formulas written as exp(+iHt).
enum class ExpSign { Minus, Plus };

inline double sign_factor(ExpSign s) { return s == ExpSign::Minus ? 1.0 : -1.0; }

// Qubit q (0-based, q = 0 is the leftmost tensor factor) lives on this bit of
// a basis index.
inline int bit_of(int n, int q) { return n - 1 - q; }

inline std::uint64_t dim_of(int n) { return std::uint64_t{1} << n; }

}  // namespace daqc
