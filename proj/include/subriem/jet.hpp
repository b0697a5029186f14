#pragma once

// Dense truncated multivariate Taylor polynomials (jets).
//
// Coefficients are stored against multi-indices in graded lexicographic order
// (all of degree 0, then degree 1, ...). A jet of dimension n and order K has
// binom(n+K, K) coefficients; coefficient(mu) is the Taylor coefficient, i.e.
// the partial derivative divided by mu!. Multiplication runs over a
// precomputed triple table (i, j, k) with deg(i)+deg(j) <= K, sorted by output
// index so that accumulation order is identical across truncation orders.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "subriem/errors.hpp"

namespace subriem {

inline constexpr int kDefaultMaxOrder = 8;

namespace detail {

inline std::size_t binomial(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::size_t r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline std::size_t jet_size(int dim, int order) {
    return binomial(static_cast<std::size_t>(dim + order), static_cast<std::size_t>(order));
}

struct JetTables {
    int dim = 0;
    int order = 0;
    std::size_t size = 0;
    std::vector<uint8_t> exps;              // dim entries per index
    std::vector<std::size_t> deg_offset;    // index where degree d starts; size order+2
    struct Triple {
        uint32_t k, i, j;
    };
    std::vector<Triple> mul;                // sorted by (k, i)
    std::vector<std::vector<uint32_t>> dsrc;  // per variable: source index of d/dx_v
    std::vector<std::vector<double>> dfac;    // matching factor (mu_v + 1)

    const uint8_t* exp(std::size_t idx) const { return exps.data() + idx * dim; }
};

inline void enumerate_degree(int dim, int deg, std::vector<uint8_t>& cur,
                             std::vector<uint8_t>& out) {
    if (dim == 1) {
        cur.push_back(static_cast<uint8_t>(deg));
        out.insert(out.end(), cur.begin(), cur.end());
        cur.pop_back();
        return;
    }
    for (int a = deg; a >= 0; --a) {
        cur.push_back(static_cast<uint8_t>(a));
        enumerate_degree(dim - 1, deg - a, cur, out);
        cur.pop_back();
    }
}

inline uint64_t pack_exp(const uint8_t* e, int dim) {
    uint64_t key = 0;
    for (int v = 0; v < dim; ++v) key = key << 8 | e[v];
    return key;
}

inline std::shared_ptr<const JetTables> build_tables(int dim, int order) {
    auto t = std::make_shared<JetTables>();
    t->dim = dim;
    t->order = order;
    t->deg_offset.assign(static_cast<std::size_t>(order) + 2, 0);
    std::vector<uint8_t> cur;
    for (int d = 0; d <= order; ++d) {
        t->deg_offset[static_cast<std::size_t>(d)] = t->exps.size() / static_cast<std::size_t>(dim);
        enumerate_degree(dim, d, cur, t->exps);
    }
    t->size = t->exps.size() / static_cast<std::size_t>(dim);
    t->deg_offset[static_cast<std::size_t>(order) + 1] = t->size;

    std::map<uint64_t, uint32_t> rank;
    for (std::size_t i = 0; i < t->size; ++i) rank[pack_exp(t->exp(i), dim)] = static_cast<uint32_t>(i);

    // Multiplication triples: all (i, j) with deg(i) + deg(j) <= order.
    std::vector<uint8_t> sum(static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < t->size; ++i) {
        int di = 0;
        for (int v = 0; v < dim; ++v) di += t->exp(i)[v];
        const std::size_t jmax = t->deg_offset[static_cast<std::size_t>(order - di) + 1];
        for (std::size_t j = 0; j < jmax; ++j) {
            for (int v = 0; v < dim; ++v) sum[static_cast<std::size_t>(v)] =
                static_cast<uint8_t>(t->exp(i)[v] + t->exp(j)[v]);
            const uint32_t k = rank.at(pack_exp(sum.data(), dim));
            t->mul.push_back({k, static_cast<uint32_t>(i), static_cast<uint32_t>(j)});
        }
    }
    std::sort(t->mul.begin(), t->mul.end(), [](const JetTables::Triple& a, const JetTables::Triple& b) {
        if (a.k != b.k) return a.k < b.k;
        return a.i < b.i;
    });

    // Derivative maps: output jet has order-1; entry idx of the derivative in
    // variable v reads from rank(exp(idx) + e_v) with factor exp(idx)[v] + 1.
    if (order >= 1) {
        const std::size_t nsmall = t->deg_offset[static_cast<std::size_t>(order)];
        t->dsrc.assign(static_cast<std::size_t>(dim), {});
        t->dfac.assign(static_cast<std::size_t>(dim), {});
        std::vector<uint8_t> up(static_cast<std::size_t>(dim));
        for (int v = 0; v < dim; ++v) {
            auto& src = t->dsrc[static_cast<std::size_t>(v)];
            auto& fac = t->dfac[static_cast<std::size_t>(v)];
            src.resize(nsmall);
            fac.resize(nsmall);
            for (std::size_t i = 0; i < nsmall; ++i) {
                for (int w = 0; w < dim; ++w) up[static_cast<std::size_t>(w)] = t->exp(i)[w];
                up[static_cast<std::size_t>(v)] += 1;
                src[i] = rank.at(pack_exp(up.data(), dim));
                fac[i] = static_cast<double>(up[static_cast<std::size_t>(v)]);
            }
        }
    }
    return t;
}

inline const JetTables& tables(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::shared_ptr<const JetTables>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim, order}];
    if (!slot) slot = build_tables(dim, order);
    return *slot;
}

// Index scatter map from (dim_from, order) jets into dim_to >= dim_from jets
// where the extra variables get exponent zero. Because trailing zeros sort the
// same way in graded lex order when they come *after* the shared block, the
// scatter must be computed through the rank map of the target layout.
inline const std::vector<uint32_t>& inject_map(int dim_from, int dim_to, int order) {
    static std::mutex mu;
    static std::map<std::tuple<int, int, int>, std::shared_ptr<std::vector<uint32_t>>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[{dim_from, dim_to, order}];
    if (!slot) {
        const JetTables& src = tables(dim_from, order);
        const JetTables& dst = tables(dim_to, order);
        std::map<uint64_t, uint32_t> rank;
        for (std::size_t i = 0; i < dst.size; ++i)
            rank[pack_exp(dst.exp(i), dim_to)] = static_cast<uint32_t>(i);
        auto v = std::make_shared<std::vector<uint32_t>>(src.size);
        std::vector<uint8_t> e(static_cast<std::size_t>(dim_to), 0);
        for (std::size_t i = 0; i < src.size; ++i) {
            for (int w = 0; w < dim_from; ++w) e[static_cast<std::size_t>(w)] = src.exp(i)[w];
            (*v)[i] = rank.at(pack_exp(e.data(), dim_to));
        }
        slot = v;
    }
    return *slot;
}

}  // namespace detail

class Jet {
public:
    Jet() = default;
    Jet(int dim, int order)
        : dim_(dim), order_(order), c_(detail::jet_size(dim, order), 0.0) {}

    static Jet constant(int dim, int order, double v) {
        Jet j(dim, order);
        j.c_[0] = v;
        return j;
    }

    static Jet variable(int dim, int order, int var, double value) {
        Jet j(dim, order);
        j.c_[0] = value;
        if (order >= 1) j.c_[1 + static_cast<std::size_t>(var)] = 1.0;
        return j;
    }

    int dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t size() const { return c_.size(); }
    double value() const { return c_.empty() ? 0.0 : c_[0]; }
    std::span<const double> coeffs() const { return c_; }
    double& raw(std::size_t i) { return c_[i]; }
    double raw(std::size_t i) const { return c_[i]; }

    // Taylor coefficient for the multi-index mu.
    double coeff(std::span<const int> mu) const {
        const auto& t = detail::tables(dim_, order_);
        int deg = 0;
        for (int m : mu) deg += m;
        if (static_cast<int>(mu.size()) != dim_ || deg > order_)
            fail(ErrorKind::domain, "multi-index outside jet range");
        for (std::size_t i = t.deg_offset[static_cast<std::size_t>(deg)];
             i < t.deg_offset[static_cast<std::size_t>(deg) + 1]; ++i) {
            bool match = true;
            for (int v = 0; v < dim_; ++v)
                if (t.exp(i)[v] != mu[static_cast<std::size_t>(v)]) { match = false; break; }
            if (match) return c_[i];
        }
        fail(ErrorKind::domain, "multi-index not found");
    }

    // Partial derivative d^{|mu|} f / dx^mu evaluated at the base point.
    double derivative(std::span<const int> mu) const {
        double f = 1.0;
        for (int m : mu)
            for (int i = 2; i <= m; ++i) f *= i;
        return coeff(mu) * f;
    }

    Jet truncated(int new_order) const {
        if (new_order > order_) fail(ErrorKind::order_exhausted, "cannot extend jet order");
        if (new_order == order_) return *this;
        Jet j(dim_, new_order);
        for (std::size_t i = 0; i < j.c_.size(); ++i) j.c_[i] = c_[i];
        return j;
    }

    // d/dx_v as a jet of one lower order.
    Jet partial(int v) const {
        if (order_ < 1)
            fail(ErrorKind::order_exhausted, "derivative of an order-0 jet");
        const auto& t = detail::tables(dim_, order_);
        Jet out(dim_, order_ - 1);
        const auto& src = t.dsrc[static_cast<std::size_t>(v)];
        const auto& fac = t.dfac[static_cast<std::size_t>(v)];
        for (std::size_t i = 0; i < out.c_.size(); ++i) out.c_[i] = fac[i] * c_[src[i]];
        return out;
    }

    Jet operator-() const {
        Jet j = *this;
        for (double& x : j.c_) x = -x;
        return j;
    }

    friend Jet operator+(const Jet& a, const Jet& b) {
        check_match(a, b);
        Jet j = a;
        for (std::size_t i = 0; i < j.c_.size(); ++i) j.c_[i] += b.c_[i];
        return j;
    }

    friend Jet operator-(const Jet& a, const Jet& b) {
        check_match(a, b);
        Jet j = a;
        for (std::size_t i = 0; i < j.c_.size(); ++i) j.c_[i] -= b.c_[i];
        return j;
    }

    friend Jet operator*(const Jet& a, const Jet& b) {
        check_match(a, b);
        return mul_to_order(a, b, a.order_);
    }

    friend Jet operator/(const Jet& a, const Jet& b);

    friend Jet operator*(double s, const Jet& a) {
        Jet j = a;
        for (double& x : j.c_) x *= s;
        return j;
    }
    friend Jet operator*(const Jet& a, double s) { return s * a; }
    friend Jet operator+(const Jet& a, double s) {
        Jet j = a;
        j.c_[0] += s;
        return j;
    }
    friend Jet operator+(double s, const Jet& a) { return a + s; }
    friend Jet operator-(const Jet& a, double s) { return a + (-s); }
    friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
    friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }

    // Truncated product; operands may carry higher order than the result.
    static Jet mul_to_order(const Jet& a, const Jet& b, int order) {
        if (a.dim_ != b.dim_) fail(ErrorKind::domain, "jet dimension mismatch");
        if (a.order_ < order || b.order_ < order)
            fail(ErrorKind::order_exhausted, "operand order too low for product");
        const auto& t = detail::tables(a.dim_, order);
        Jet out(a.dim_, order);
        for (const auto& tr : t.mul) out.c_[tr.k] += a.c_[tr.i] * b.c_[tr.j];
        return out;
    }

    // Composition with a univariate Taylor series around the jet's value:
    // returns sum_m series[m] * (jet - value)^m, truncated.
    friend Jet compose_series(const Jet& u, std::span<const double> series) {
        Jet w = u;
        w.c_[0] = 0.0;
        const int K = u.order_;
        Jet acc = Jet::constant(u.dim_, K, series[static_cast<std::size_t>(K)]);
        for (int m = K - 1; m >= 0; --m)
            acc = Jet::mul_to_order(acc, w, K) + series[static_cast<std::size_t>(m)];
        return acc;
    }

private:
    static void check_match(const Jet& a, const Jet& b) {
        if (a.dim_ != b.dim_) fail(ErrorKind::domain, "jet dimension mismatch");
        if (a.order_ != b.order_) fail(ErrorKind::domain, "jet order mismatch");
    }

    int dim_ = 0;
    int order_ = 0;
    std::vector<double> c_;
};

namespace detail {

inline std::vector<double> series_recip(double c, int K) {
    if (c == 0.0) fail(ErrorKind::domain, "division by zero constant term");
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    double p = 1.0 / c;
    for (int m = 0; m <= K; ++m) {
        s[static_cast<std::size_t>(m)] = p;
        p *= -1.0 / c;
    }
    return s;
}

inline std::vector<double> series_exp(double c, int K) {
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    double f = std::exp(c);
    for (int m = 0; m <= K; ++m) {
        s[static_cast<std::size_t>(m)] = f;
        f /= (m + 1);
    }
    return s;
}

inline std::vector<double> series_log(double c, int K) {
    if (c <= 0.0) fail(ErrorKind::domain, "log of a non-positive value");
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    s[0] = std::log(c);
    double p = 1.0;
    for (int m = 1; m <= K; ++m) {
        p /= c;
        s[static_cast<std::size_t>(m)] = (m % 2 ? p : -p) / m;
    }
    return s;
}

inline std::vector<double> series_sqrt(double c, int K) {
    if (c <= 0.0) fail(ErrorKind::domain, "sqrt of a non-positive value");
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    s[0] = std::sqrt(c);
    for (int m = 1; m <= K; ++m)
        s[static_cast<std::size_t>(m)] =
            s[static_cast<std::size_t>(m) - 1] * (1.5 / m - 1.0) / c;
    return s;
}

inline std::vector<double> series_sin(double c, int K, bool hyperbolic) {
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    const double sn = hyperbolic ? std::sinh(c) : std::sin(c);
    const double cs = hyperbolic ? std::cosh(c) : std::cos(c);
    double f = 1.0;
    for (int m = 0; m <= K; ++m) {
        if (m > 0) f /= m;
        const double base = (m % 2 == 0) ? sn : cs;
        const double sign = hyperbolic ? 1.0 : ((m / 2) % 2 ? -1.0 : 1.0);
        s[static_cast<std::size_t>(m)] = sign * base * f;
    }
    return s;
}

inline std::vector<double> series_cos(double c, int K, bool hyperbolic) {
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    const double sn = hyperbolic ? std::sinh(c) : std::sin(c);
    const double cs = hyperbolic ? std::cosh(c) : std::cos(c);
    double f = 1.0;
    for (int m = 0; m <= K; ++m) {
        if (m > 0) f /= m;
        const double base = (m % 2 == 0) ? cs : sn;
        double sign;
        if (hyperbolic)
            sign = 1.0;
        else
            sign = ((m + 1) / 2 % 2) ? -1.0 : 1.0;
        s[static_cast<std::size_t>(m)] = sign * base * f;
    }
    return s;
}

inline std::vector<double> series_atan(double c, int K) {
    // f'(w) = 1 / (q0 + q1 w + w^2) with q0 = 1 + c^2, q1 = 2c.
    std::vector<double> s(static_cast<std::size_t>(K) + 1);
    s[0] = std::atan(c);
    const double q0 = 1.0 + c * c, q1 = 2.0 * c;
    std::vector<double> b(static_cast<std::size_t>(std::max(K, 1)));
    for (int m = 0; m < K; ++m) {
        double num = (m == 0) ? 1.0 : 0.0;
        if (m >= 1) num -= q1 * b[static_cast<std::size_t>(m) - 1];
        if (m >= 2) num -= b[static_cast<std::size_t>(m) - 2];
        b[static_cast<std::size_t>(m)] = num / q0;
        s[static_cast<std::size_t>(m) + 1] = b[static_cast<std::size_t>(m)] / (m + 1);
    }
    return s;
}

}  // namespace detail

inline Jet operator/(const Jet& a, const Jet& b) {
    if (a.dim() != b.dim()) fail(ErrorKind::domain, "jet dimension mismatch");
    if (a.order() != b.order()) fail(ErrorKind::domain, "jet order mismatch");
    return a * compose_series(b, detail::series_recip(b.value(), b.order()));
}

inline Jet recip(const Jet& a) {
    return compose_series(a, detail::series_recip(a.value(), a.order()));
}
inline Jet exp(const Jet& a) { return compose_series(a, detail::series_exp(a.value(), a.order())); }
inline Jet log(const Jet& a) { return compose_series(a, detail::series_log(a.value(), a.order())); }
inline Jet sqrt(const Jet& a) { return compose_series(a, detail::series_sqrt(a.value(), a.order())); }
inline Jet sin(const Jet& a) { return compose_series(a, detail::series_sin(a.value(), a.order(), false)); }
inline Jet cos(const Jet& a) { return compose_series(a, detail::series_cos(a.value(), a.order(), false)); }
inline Jet sinh(const Jet& a) { return compose_series(a, detail::series_sin(a.value(), a.order(), true)); }
inline Jet cosh(const Jet& a) { return compose_series(a, detail::series_cos(a.value(), a.order(), true)); }
inline Jet tan(const Jet& a) { return sin(a) / cos(a); }
inline Jet tanh(const Jet& a) { return sinh(a) / cosh(a); }
inline Jet atan(const Jet& a) { return compose_series(a, detail::series_atan(a.value(), a.order())); }

inline Jet pow_int(const Jet& a, int n) {
    if (n < 0) return recip(pow_int(a, -n));
    Jet r = Jet::constant(a.dim(), a.order(), 1.0);
    for (int i = 0; i < n; ++i) r = r * a;
    return r;
}

}  // namespace subriem
