#pragma once

// Shared numeric utilities: low-discrepancy sampling, natural cubic splines,
// 4th-order finite-difference stencils, composite Simpson prefix sums.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

#include "subriem/errors.hpp"

namespace subriem {

inline double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

// Point k of the Halton sequence (bases 2,3,5,...) mapped into [lo, hi]^dim.
// The seed offsets the sequence start so runs are reproducible but selectable.
template <std::size_t N>
std::array<double, N> halton_point(std::uint64_t k, std::uint64_t seed,
                                   const std::array<double, N>& lo,
                                   const std::array<double, N>& hi) {
    static constexpr unsigned bases[] = {2, 3, 5, 7, 11, 13, 17, 19};
    static_assert(N <= 8);
    std::array<double, N> p;
    for (std::size_t i = 0; i < N; ++i) {
        const double u = halton(k + seed * 7919 + 13, bases[i]);
        p[i] = lo[i] + (hi[i] - lo[i]) * u;
    }
    return p;
}

class CubicSpline {
public:
    CubicSpline() = default;

    // Natural cubic spline through (x_i, y_i); x strictly increasing.
    CubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 3 || y_.size() != n) fail(ErrorKind::numeric, "spline needs >= 3 knots");
        std::vector<double> h(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            if (h[i] <= 0) fail(ErrorKind::numeric, "spline knots must increase");
        }
        // Tridiagonal solve for second derivatives (natural boundary).
        std::vector<double> a(n, 0.0), b(n, 0.0), c(n, 0.0), d(n, 0.0);
        b[0] = b[n - 1] = 1.0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            a[i] = h[i - 1];
            b[i] = 2.0 * (h[i - 1] + h[i]);
            c[i] = h[i];
            d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
        }
        m_.assign(n, 0.0);
        for (std::size_t i = 1; i < n; ++i) {
            const double w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        m_[n - 1] = d[n - 1] / b[n - 1];
        for (std::size_t i = n - 1; i-- > 0;) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    }

    double operator()(double x) const {
        const std::size_t n = x_.size();
        std::size_t lo = 0, hi = n - 1;
        if (x <= x_[0]) {
            hi = 1;
        } else if (x >= x_[n - 1]) {
            lo = n - 2;
        } else {
            while (hi - lo > 1) {
                const std::size_t mid = (lo + hi) / 2;
                (x_[mid] <= x ? lo : hi) = mid;
            }
        }
        const double h = x_[lo + 1] - x_[lo];
        const double A = (x_[lo + 1] - x) / h, B = (x - x_[lo]) / h;
        return A * y_[lo] + B * y_[lo + 1] +
               ((A * A * A - A) * m_[lo] + (B * B * B - B) * m_[lo + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> x_, y_, m_;
};

// 4th-order first derivative on a uniform grid; central in the interior,
// one-sided 5-point stencils at the edges.
inline double stencil_d1(const std::vector<double>& f, std::size_t i, double h) {
    const std::size_t n = f.size();
    if (n < 5) fail(ErrorKind::numeric, "grid too coarse for 4th-order differences");
    auto at = [&](std::size_t k) { return f[k]; };
    if (i >= 2 && i + 2 < n)
        return (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
    if (i == 0)
        return (-25 * at(0) + 48 * at(1) - 36 * at(2) + 16 * at(3) - 3 * at(4)) / (12 * h);
    if (i == 1)
        return (-3 * at(0) - 10 * at(1) + 18 * at(2) - 6 * at(3) + at(4)) / (12 * h);
    if (i + 2 == n)
        return (3 * at(n - 1) + 10 * at(n - 2) - 18 * at(n - 3) + 6 * at(n - 4) - at(n - 5)) /
               (12 * h);
    // i == n-1
    return (25 * at(n - 1) - 48 * at(n - 2) + 36 * at(n - 3) - 16 * at(n - 4) + 3 * at(n - 5)) /
           (12 * h);
}

// Composite Simpson prefix integrals on a uniform grid with an even interval
// count per prefix; odd tails use one Simpson 3/8-like correction via local
// quadratic fit. Returns I[k] ~= integral from x0 to x_k.
inline std::vector<double> simpson_prefix(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> I(n, 0.0);
    if (n < 2) return I;
    for (std::size_t k = 1; k < n; ++k) {
        if (k % 2 == 0) {
            I[k] = I[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        } else if (k >= 2) {
            // quadratic through (k-2, k-1, k), integrated over the last step
            I[k] = I[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
        } else {
            I[1] = h / 2.0 * (f[0] + f[1]);  // k == 1 on a 2-point prefix
        }
    }
    // improve I[1] with the quadratic through the first three points
    if (n >= 3) I[1] = h / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    return I;
}

// Chunked parallel loop; falls back to serial for small ranges.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (n < 2 || hw == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(hw, n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) body(i);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace subriem
