#ifndef SPR3_LINALG_HPP
#define SPR3_LINALG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace spr3 {

// Fixed-size 3-vector, templated on the scalar so the same kinematics run on
// plain doubles and on instrumented scalars.
template <typename T>
struct Vec3 {
    std::array<T, 3> v{};

    constexpr Vec3() = default;
    constexpr Vec3(T x, T y, T z) : v{x, y, z} {}

    constexpr T& operator[](std::size_t i) { return v[i]; }
    constexpr const T& operator[](std::size_t i) const { return v[i]; }

    constexpr T x() const { return v[0]; }
    constexpr T y() const { return v[1]; }
    constexpr T z() const { return v[2]; }
};

template <typename T>
Vec3<T> operator+(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

template <typename T>
Vec3<T> operator-(const Vec3<T>& a, const Vec3<T>& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

template <typename T>
Vec3<T> operator*(const T& s, const Vec3<T>& a) {
    return {s * a[0], s * a[1], s * a[2]};
}

template <typename T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

template <typename T>
T norm(const Vec3<T>& a) {
    using std::sqrt;
    return sqrt(dot(a, a));
}

// Row-major 3x3 matrix.
template <typename T>
struct Mat3 {
    std::array<std::array<T, 3>, 3> m{};

    constexpr std::array<T, 3>& operator[](std::size_t r) { return m[r]; }
    constexpr const std::array<T, 3>& operator[](std::size_t r) const { return m[r]; }

    static Mat3 identity() {
        Mat3 out;
        for (std::size_t i = 0; i < 3; ++i) {
            for (std::size_t j = 0; j < 3; ++j) {
                out[i][j] = T(i == j ? 1.0 : 0.0);
            }
        }
        return out;
    }

    Vec3<T> column(std::size_t c) const { return {m[0][c], m[1][c], m[2][c]}; }

    void set_column(std::size_t c, const Vec3<T>& col) {
        for (std::size_t r = 0; r < 3; ++r) {
            m[r][c] = col[r];
        }
    }
};

template <typename T>
Vec3<T> operator*(const Mat3<T>& a, const Vec3<T>& x) {
    Vec3<T> out;
    for (std::size_t r = 0; r < 3; ++r) {
        out[r] = a[r][0] * x[0] + a[r][1] * x[1] + a[r][2] * x[2];
    }
    return out;
}

template <typename T>
Mat3<T> operator*(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> out;
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
        }
    }
    return out;
}

template <typename T>
Mat3<T> operator-(const Mat3<T>& a, const Mat3<T>& b) {
    Mat3<T> out;
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            out[r][c] = a[r][c] - b[r][c];
        }
    }
    return out;
}

template <typename T>
Mat3<T> transpose(const Mat3<T>& a) {
    Mat3<T> out;
    for (std::size_t r = 0; r < 3; ++r) {
        for (std::size_t c = 0; c < 3; ++c) {
            out[r][c] = a[c][r];
        }
    }
    return out;
}

inline double determinant(const Mat3<double>& a) {
    return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) -
           a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
           a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
}

inline double max_abs_entry(const Mat3<double>& a) {
    double out = 0.0;
    for (const auto& row : a.m) {
        for (double x : row) {
            out = std::max(out, std::abs(x));
        }
    }
    return out;
}

}  // namespace spr3

#endif  // SPR3_LINALG_HPP
