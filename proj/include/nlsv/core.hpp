/// @file core.hpp
/// @brief Small value types (2-vectors, 2x2 matrices, 4th-order tensors) and error types.

#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nlsv {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
inline Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
inline Vec2 operator*(double s, Vec2 a) { return a *= s; }
inline Vec2 operator*(Vec2 a, double s) { return a *= s; }
inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::sqrt(dot(a, a)); }

/// General 2x2 matrix. Gradients use the layout xy = d(u_x)/dy, yx = d(u_y)/dx,
/// so the flat order [xx, xy, yx, yy] is the gradient component index used by Tensor4.
struct Mat2 {
    double xx = 0.0;
    double xy = 0.0;
    double yx = 0.0;
    double yy = 0.0;

    static Mat2 identity(double s = 1.0) { return {s, 0.0, 0.0, s}; }
    static Mat2 from_flat(const std::array<double, 4>& f) { return {f[0], f[1], f[2], f[3]}; }

    double operator[](int a) const {
        switch (a) {
            case 0: return xx;
            case 1: return xy;
            case 2: return yx;
            default: return yy;
        }
    }
    std::array<double, 4> flat() const { return {xx, xy, yx, yy}; }

    Mat2& operator+=(const Mat2& o) { xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy; return *this; }
    Mat2& operator-=(const Mat2& o) { xx -= o.xx; xy -= o.xy; yx -= o.yx; yy -= o.yy; return *this; }
    Mat2& operator*=(double s) { xx *= s; xy *= s; yx *= s; yy *= s; return *this; }
};

inline Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
inline Mat2 operator-(Mat2 a, const Mat2& b) { return a -= b; }
inline Mat2 operator*(double s, Mat2 a) { return a *= s; }
inline Vec2 operator*(const Mat2& m, const Vec2& v) { return {m.xx * v.x + m.xy * v.y, m.yx * v.x + m.yy * v.y}; }
/// Frobenius inner product.
inline double inner(const Mat2& a, const Mat2& b) { return a.xx * b.xx + a.xy * b.xy + a.yx * b.yx + a.yy * b.yy; }
inline double max_abs(const Mat2& a) {
    return std::max(std::max(std::abs(a.xx), std::abs(a.xy)), std::max(std::abs(a.yx), std::abs(a.yy)));
}

/// Fourth-order tensor acting on 2x2 matrices, stored as a 4x4 matrix over the
/// flat gradient index a = 2*i + j (component i, derivative j): sigma_a = sum_b C(a,b) G_b.
struct Tensor4 {
    std::array<double, 16> c{};

    double& operator()(int a, int b) { return c[4 * a + b]; }
    double operator()(int a, int b) const { return c[4 * a + b]; }

    static Tensor4 identity(double s = 1.0) {
        Tensor4 t;
        for (int a = 0; a < 4; ++a) t(a, a) = s;
        return t;
    }

    /// Tensor of a matrix coefficient acting on each velocity component's gradient:
    /// C_{(i,j),(k,l)} = delta_ik A_jl.
    static Tensor4 from_matrix(const Mat2& A) {
        Tensor4 t;
        for (int i = 0; i < 2; ++i) {
            t(2 * i + 0, 2 * i + 0) = A.xx;
            t(2 * i + 0, 2 * i + 1) = A.xy;
            t(2 * i + 1, 2 * i + 0) = A.yx;
            t(2 * i + 1, 2 * i + 1) = A.yy;
        }
        return t;
    }

    Mat2 apply(const Mat2& g) const {
        std::array<double, 4> in = g.flat(), out{};
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) out[a] += (*this)(a, b) * in[b];
        return Mat2::from_flat(out);
    }

    Tensor4& operator+=(const Tensor4& o) { for (int k = 0; k < 16; ++k) c[k] += o.c[k]; return *this; }
    Tensor4& operator*=(double s) { for (auto& x : c) x *= s; return *this; }
};

inline Tensor4 operator*(double s, Tensor4 t) { return t *= s; }
inline Tensor4 operator+(Tensor4 a, const Tensor4& b) { return a += b; }

// ============================================================================
// Errors
// ============================================================================

/// Linear solver did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + " after " +
                             std::to_string(iterations) + " iterations)"),
          residual_(residual), iterations_(iterations) {}
    double residual() const { return residual_; }
    int iterations() const { return iterations_; }

private:
    double residual_;
    int iterations_;
};

/// Point evaluation outside the closed domain.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inconsistent solver state (clock/history mismatch, bad preconditions).
class StateError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Non-finite values met while integrating particle characteristics.
class IntegrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace nlsv
