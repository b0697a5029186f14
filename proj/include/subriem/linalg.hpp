#pragma once

// Small fixed-size dense linear algebra: 3x3 / 6x6 solves, matrix exponential
// (scaling-and-squaring Pade 13), symmetric eigenvalues via Jacobi sweeps.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

#include "subriem/errors.hpp"

namespace subriem {

template <std::size_t N>
using Vec = std::array<double, N>;
template <std::size_t N>
using Mat = std::array<std::array<double, N>, N>;

using Vec3 = Vec<3>;
using Vec6 = Vec<6>;
using Mat3 = Mat<3>;
using Mat6 = Mat<6>;

template <std::size_t N>
Mat<N> mat_zero() {
    Mat<N> m{};
    return m;
}

template <std::size_t N>
Mat<N> mat_identity() {
    Mat<N> m{};
    for (std::size_t i = 0; i < N; ++i) m[i][i] = 1.0;
    return m;
}

template <std::size_t N>
Mat<N> operator+(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = a[i][j] + b[i][j];
    return r;
}

template <std::size_t N>
Mat<N> operator-(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = a[i][j] - b[i][j];
    return r;
}

template <std::size_t N>
Mat<N> operator*(double s, const Mat<N>& a) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = s * a[i][j];
    return r;
}

template <std::size_t N>
Mat<N> operator*(const Mat<N>& a, const Mat<N>& b) {
    Mat<N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t k = 0; k < N; ++k) {
            const double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < N; ++j) r[i][j] += aik * b[k][j];
        }
    return r;
}

template <std::size_t N>
Vec<N> operator*(const Mat<N>& a, const Vec<N>& x) {
    Vec<N> r{};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i] += a[i][j] * x[j];
    return r;
}

template <std::size_t N>
Mat<N> transpose(const Mat<N>& a) {
    Mat<N> r;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) r[i][j] = a[j][i];
    return r;
}

template <std::size_t N>
double norm_inf(const Mat<N>& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < N; ++j) row += std::fabs(a[i][j]);
        best = std::max(best, row);
    }
    return best;
}

template <std::size_t N>
double max_abs(const Mat<N>& a) {
    double best = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) best = std::max(best, std::fabs(a[i][j]));
    return best;
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

inline double det3(const Mat3& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

// In-place LU with partial pivoting; solves A x = b for a single rhs.
template <std::size_t N>
Vec<N> lu_solve(Mat<N> a, Vec<N> b) {
    for (std::size_t col = 0; col < N; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < N; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) fail(ErrorKind::numeric, "singular linear system");
        if (piv != col) {
            std::swap(a[piv], a[col]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < N; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            a[r][col] = 0.0;
            for (std::size_t j = col + 1; j < N; ++j) a[r][j] -= f * a[col][j];
            b[r] -= f * b[col];
        }
    }
    Vec<N> x{};
    for (std::size_t ii = N; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < N; ++j) s -= a[ii][j] * x[j];
        x[ii] = s / a[ii][ii];
    }
    return x;
}

template <std::size_t N>
Mat<N> inverse(const Mat<N>& a) {
    Mat<N> inv;
    for (std::size_t j = 0; j < N; ++j) {
        Vec<N> e{};
        e[j] = 1.0;
        Vec<N> col = lu_solve(a, e);
        for (std::size_t i = 0; i < N; ++i) inv[i][j] = col[i];
    }
    return inv;
}

// Matrix exponential by scaling-and-squaring with the (13,13) Pade approximant.
template <std::size_t N>
Mat<N> expm(Mat<N> a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                               1187353796428800.0,  129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,       1323241920.0,
                               40840800.0,          960960.0,            16380.0,
                               182.0,               1.0};
    const double theta13 = 5.371920351148152;
    int squarings = 0;
    const double nrm = norm_inf(a);
    if (nrm > theta13) {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
        a = std::ldexp(1.0, -squarings) * a;
    }
    const Mat<N> I = mat_identity<N>();
    const Mat<N> a2 = a * a;
    const Mat<N> a4 = a2 * a2;
    const Mat<N> a6 = a4 * a2;
    Mat<N> u = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 + b[3] * a2 +
               b[1] * I;
    u = a * u;
    Mat<N> v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 +
               b[0] * I;
    // r = (v - u)^{-1} (v + u)
    Mat<N> num = v + u;
    Mat<N> den = v - u;
    Mat<N> r;
    for (std::size_t j = 0; j < N; ++j) {
        Vec<N> col;
        for (std::size_t i = 0; i < N; ++i) col[i] = num[i][j];
        Vec<N> x = lu_solve(den, col);
        for (std::size_t i = 0; i < N; ++i) r[i][j] = x[i];
    }
    for (int s = 0; s < squarings; ++s) r = r * r;
    return r;
}

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending order.
template <std::size_t N>
Vec<N> sym_eigenvalues(Mat<N> a) {
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    Vec<N> ev;
    for (std::size_t i = 0; i < N; ++i) ev[i] = a[i][i];
    std::sort(ev.begin(), ev.end());
    return ev;
}

}  // namespace subriem
