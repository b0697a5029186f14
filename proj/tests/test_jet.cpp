#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "subriem/jet.hpp"

using namespace subriem;

namespace {

Jet var(int dim, int order, int i, double v) { return Jet::variable(dim, order, i, v); }

}  // namespace

TEST_SUITE_BEGIN("jets");

TEST_CASE("product truncates correctly: (1 + x)(1 - x) at order 2") {
    Jet x = var(1, 2, 0, 0.0);
    Jet p = (1.0 + x) * (1.0 - x);
    CHECK(p.value() == doctest::Approx(1.0));
    CHECK(p.coeff(std::vector<int>{1}) == doctest::Approx(0.0));
    CHECK(p.coeff(std::vector<int>{2}) == doctest::Approx(-1.0));
}

TEST_CASE("geometric series: 1 / (1 - x) at order 2") {
    Jet x = var(1, 2, 0, 0.0);
    Jet q = Jet::constant(1, 2, 1.0) / (1.0 - x);
    CHECK(q.coeff(std::vector<int>{0}) == doctest::Approx(1.0));
    CHECK(q.coeff(std::vector<int>{1}) == doctest::Approx(1.0));
    CHECK(q.coeff(std::vector<int>{2}) == doctest::Approx(1.0));
}

TEST_CASE("dimension mismatch is an error") {
    Jet a = var(1, 2, 0, 0.0);
    Jet b = var(2, 2, 0, 0.0);
    CHECK_THROWS_AS(a * b, Error);
    CHECK_THROWS_AS(a + b, Error);
}

TEST_CASE("division by zero constant term is a domain error") {
    Jet x = var(1, 1, 0, 0.0);
    CHECK_THROWS_AS(Jet::constant(1, 1, 1.0) / x, Error);
}

TEST_CASE("polynomial coefficients are exact: (x + 2y)^3 in 2 vars") {
    // (x + 2y)^3 = x^3 + 6x^2 y + 12x y^2 + 8y^3, expanded at (0.7, -0.3).
    const double px = 0.7, py = -0.3;
    Jet x = var(2, 3, 0, px), y = var(2, 3, 1, py);
    Jet p = pow_int(x + 2.0 * y, 3);
    const double u = px + 2 * py;
    CHECK(p.value() == doctest::Approx(u * u * u).epsilon(1e-12));
    CHECK(p.coeff(std::vector<int>{3, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.coeff(std::vector<int>{2, 1}) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(p.coeff(std::vector<int>{1, 2}) == doctest::Approx(12.0).epsilon(1e-12));
    CHECK(p.coeff(std::vector<int>{0, 3}) == doctest::Approx(8.0).epsilon(1e-12));
    CHECK(p.derivative(std::vector<int>{1, 1}) == doctest::Approx(12.0 * u).epsilon(1e-12));
}

TEST_CASE("orders k and k+1 agree bitwise on shared coefficients for polynomials") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int rep = 0; rep < 20; ++rep) {
        const int dim = 3;
        const double a = U(rng), b = U(rng), c = U(rng);
        for (int k = 1; k <= 5; ++k) {
            auto build = [&](int order) {
                Jet x = var(dim, order, 0, a), y = var(dim, order, 1, b), z = var(dim, order, 2, c);
                return (x + 2.0 * y) * (z - x * y) + pow_int(z + 0.5, 3) * (x - 1.0);
            };
            Jet jk = build(k), jk1 = build(k + 1);
            for (std::size_t i = 0; i < jk.size(); ++i) CHECK(jk.raw(i) == jk1.raw(i));
        }
    }
}

TEST_CASE("elementary function jets match analytic Taylor data") {
    // sin at 0, order 3: value 0, f' = 1, f'' = 0, f''' = -1.
    Jet s = sin(var(1, 3, 0, 0.0));
    CHECK(s.value() == doctest::Approx(0.0));
    CHECK(s.derivative(std::vector<int>{1}) == doctest::Approx(1.0));
    CHECK(s.derivative(std::vector<int>{2}) == doctest::Approx(0.0));
    CHECK(s.derivative(std::vector<int>{3}) == doctest::Approx(-1.0));

    // Pythagorean identity as jets at a generic point.
    Jet t = var(1, 6, 0, 0.37);
    Jet one = sin(t) * sin(t) + cos(t) * cos(t);
    CHECK(one.value() == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t i = 1; i < one.size(); ++i) CHECK(std::fabs(one.raw(i)) < 1e-13);

    // exp(log(x)) = x for x > 0.
    Jet x = var(1, 5, 0, 1.7);
    Jet idexp = exp(log(x));
    CHECK(idexp.value() == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(idexp.coeff(std::vector<int>{1}) == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 2; k <= 5; ++k) {
        std::vector<int> mu{k};
        CHECK(std::fabs(idexp.coeff(mu)) < 1e-12);
    }

    // tanh, atan, sqrt against finite differences of the scalar function.
    auto fd_check = [](auto f, auto jf, double c) {
        const double h = 1e-5;
        Jet j = jf(var(1, 2, 0, c));
        const double d1 = (f(c + h) - f(c - h)) / (2 * h);
        const double d2 = (f(c + h) - 2 * f(c) + f(c - h)) / (h * h);
        CHECK(j.value() == doctest::Approx(f(c)).epsilon(1e-13));
        CHECK(j.derivative(std::vector<int>{1}) == doctest::Approx(d1).epsilon(1e-7));
        CHECK(j.derivative(std::vector<int>{2}) == doctest::Approx(d2).epsilon(1e-4));
    };
    fd_check([](double v) { return std::tanh(v); }, [](Jet j) { return tanh(j); }, 0.4);
    fd_check([](double v) { return std::atan(v); }, [](Jet j) { return atan(j); }, -0.8);
    fd_check([](double v) { return std::sqrt(v); }, [](Jet j) { return sqrt(j); }, 2.3);
    fd_check([](double v) { return std::tan(v); }, [](Jet j) { return tan(j); }, 0.3);
    fd_check([](double v) { return std::sinh(v); }, [](Jet j) { return sinh(j); }, -0.2);
    fd_check([](double v) { return std::cosh(v); }, [](Jet j) { return cosh(j); }, 0.9);
}

TEST_CASE("domain errors: log/sqrt outside domain") {
    CHECK_THROWS_AS(log(var(1, 2, 0, -1.0)), Error);
    CHECK_THROWS_AS(log(var(1, 2, 0, 0.0)), Error);
    CHECK_THROWS_AS(sqrt(var(1, 2, 0, -0.5)), Error);
}

TEST_CASE("partial derivative extraction") {
    // f = x^2 y at (1.5, -2): df/dx = 2xy as a jet of order 1.
    Jet x = var(2, 3, 0, 1.5), y = var(2, 3, 1, -2.0);
    Jet f = x * x * y;
    Jet fx = f.partial(0);
    CHECK(fx.order() == 2);
    CHECK(fx.value() == doctest::Approx(2 * 1.5 * -2.0));
    CHECK(fx.coeff(std::vector<int>{1, 0}) == doctest::Approx(-4.0));  // d2f/dx2 / 1! = 2y
    CHECK(fx.coeff(std::vector<int>{0, 1}) == doctest::Approx(3.0));   // d2f/dxdy = 2x
    CHECK_THROWS_AS(f.partial(0).partial(1).partial(0).partial(1), Error);  // order exhausted
}

TEST_CASE("xy jet example at (2,3)") {
    Jet x = var(2, 2, 0, 2.0), y = var(2, 2, 1, 3.0);
    Jet f = x * y;
    CHECK(f.value() == doctest::Approx(6.0));
    CHECK(f.derivative(std::vector<int>{1, 0}) == doctest::Approx(3.0));
    CHECK(f.derivative(std::vector<int>{0, 1}) == doctest::Approx(2.0));
    CHECK(f.derivative(std::vector<int>{1, 1}) == doctest::Approx(1.0));
    CHECK(f.derivative(std::vector<int>{2, 0}) == doctest::Approx(0.0));
}

TEST_SUITE_END();
