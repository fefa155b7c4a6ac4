#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace bbcpl {

/// Two-component vector used for states, gradients and fields.
struct Vec2 {
    double v1{0.0};
    double v2{0.0};

    [[nodiscard]] double norm() const { return std::hypot(v1, v2); }

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.v1 + b.v1, a.v2 + b.v2}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.v1 - b.v1, a.v2 - b.v2}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.v1, s * a.v2}; }
    friend double dot(Vec2 a, Vec2 b) { return a.v1 * b.v1 + a.v2 * b.v2; }
};

/// Dense 2x2 matrix, row-major.
struct Matrix2 {
    double a11{0.0};
    double a12{0.0};
    double a21{0.0};
    double a22{0.0};

    [[nodiscard]] double trace() const { return a11 + a22; }
    [[nodiscard]] double det() const { return a11 * a22 - a12 * a21; }
    [[nodiscard]] Matrix2 transpose() const { return {a11, a21, a12, a22}; }
    [[nodiscard]] Matrix2 adjugate() const { return {a22, -a12, -a21, a11}; }

    /// Symmetric part (M + M^T) / 2.
    [[nodiscard]] Matrix2 symmetric_part() const
    {
        const double off = 0.5 * (a12 + a21);
        return {a11, off, off, a22};
    }

    /// Leading principal minors positive (Sylvester); meaningful for symmetric matrices.
    [[nodiscard]] bool positive_definite() const { return a11 > 0.0 && det() > 0.0; }

    /// Eigenvalues from the characteristic polynomial, ordered by real part.
    [[nodiscard]] std::array<std::complex<double>, 2> eigenvalues() const
    {
        const double half_tr = 0.5 * trace();
        const std::complex<double> disc = std::sqrt(std::complex<double>(half_tr * half_tr - det()));
        return {half_tr - disc, half_tr + disc};
    }

    friend Vec2 operator*(const Matrix2& m, Vec2 x)
    {
        return {m.a11 * x.v1 + m.a12 * x.v2, m.a21 * x.v1 + m.a22 * x.v2};
    }
    friend Matrix2 operator+(const Matrix2& a, const Matrix2& b)
    {
        return {a.a11 + b.a11, a.a12 + b.a12, a.a21 + b.a21, a.a22 + b.a22};
    }
    friend Matrix2 operator*(const Matrix2& a, const Matrix2& b)
    {
        return {a.a11 * b.a11 + a.a12 * b.a21, a.a11 * b.a12 + a.a12 * b.a22,
                a.a21 * b.a11 + a.a22 * b.a21, a.a21 * b.a12 + a.a22 * b.a22};
    }
};

} // namespace bbcpl
