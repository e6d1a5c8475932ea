#pragma once

#include <cmath>
#include <random>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "daqc/types.hpp"

namespace daqc::test {

inline Mat random_hermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
    return (a + a.adjoint()) / 2.0;
}

inline Vec random_state(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(n(rng), n(rng));
    return v.normalized();
}

inline Mat random_density(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cplx(n(rng), n(rng));
    Mat r = g * g.adjoint();
    return r / r.trace();
}

// exp(-i H t) through Eigen's scaling-and-squaring exponential.
inline Mat expm_oracle(const Mat& h, double t) { return (Mat(h * cplx(0.0, -t))).exp(); }

inline double spectral_oracle(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

// |tr(U^dag V)| / d: equals 1 exactly when U and V agree up to a global phase.
inline double trace_overlap(const Mat& u, const Mat& v) {
    return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

inline Mat kron(const Mat& a, const Mat& b) { return Eigen::kroneckerProduct(a, b).eval(); }

inline Mat2 pauli_oracle(char c) {
    Mat2 m;
    switch (c) {
        case 'X': m << 0, 1, 1, 0; break;
        case 'Y': m << 0, cplx(0, -1), cplx(0, 1), 0; break;
        case 'Z': m << 1, 0, 0, -1; break;
        default: m = Mat2::Identity();
    }
    return m;
}

inline Mat pauli_string_oracle(const std::string& s) {
    Mat m = Mat::Identity(1, 1);
    for (char c : s) m = kron(m, Mat(pauli_oracle(c)));
    return m;
}

}  // namespace daqc::test
