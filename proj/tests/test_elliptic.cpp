#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "xyzopen/elliptic.hpp"

using namespace xyzopen;
using namespace xyzopen::elliptic;

namespace {

cplx from_ref(std::complex<long double> z)
{
    return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}

double rel_err(cplx got, cplx want)
{
    return std::abs(got - want) / std::max(1.0, std::abs(want));
}

}  // namespace

TEST_CASE("sigma is odd and vanishes at the origin", "[elliptic]")
{
    const LatticeTau tau(cplx(0, 0.6));
    CHECK(std::abs(sigma(cplx(0, 0), tau)) < 1e-14);

    const cplx s = sigma(cplx(0.25, 0), tau);
    CHECK(std::abs(sigma(cplx(-0.25, 0), tau) + s) < 1e-13);

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> box(-0.45, 0.45);
    for (int i = 0; i < 100; ++i) {
        const cplx u(box(rng), box(rng));
        CHECK(std::abs(sigma(-u, tau) + sigma(u, tau)) < 1e-12);
        if (detail::lattice_distance(u, tau.value) > 0.05)
            CHECK(std::abs(zeta(-u, tau) + zeta(u, tau)) < 1e-12);
    }
}

TEST_CASE("quasi-periodicity under u -> u+1", "[elliptic]")
{
    const LatticeTau tau(cplx(0, 0.6));
    const cplx v = sigma(cplx(0.3, 0), tau);
    CHECK(std::abs(sigma(cplx(1.3, 0), tau) + v) < 1e-12);
}

TEST_CASE("theta values against the long-series reference", "[elliptic]")
{
    // theta[0,1/2](0.17+0.05i, 0.6i)
    const LatticeTau tau(cplx(0, 0.6));
    const cplx want = from_ref(ref::theta(0.0L, 0.5L, {0.17L, 0.05L}, {0.0L, 0.6L}));
    const cplx got = theta(ThetaChar::zero_half(), cplx(0.17, 0.05), tau);
    CHECK(rel_err(got, want) < 1e-14);

    // sigma(0.1+0.2i, 1.6i)
    const LatticeTau tau2(cplx(0, 1.6));
    const cplx want2 = from_ref(ref::sigma({0.1L, 0.2L}, {0.0L, 1.6L}));
    CHECK(rel_err(sigma(cplx(0.1, 0.2), tau2), want2) < 1e-14);
}

TEST_CASE("sigma_prime is the term-wise derivative", "[elliptic]")
{
    const LatticeTau tau(cplx(0, 0.6));

    // Central finite difference, step 1e-6, relative agreement < 1e-8.
    const cplx u(0.3, 0);
    const double h = 1e-6;
    const cplx fd = (sigma(u + h, tau) - sigma(u - h, tau)) / (2 * h);
    CHECK(std::abs(sigma_prime(u, tau) - fd) / std::abs(fd) < 1e-8);

    // sigma'(0): the normalization constant of the energy formula.
    const cplx want = from_ref(ref::sigma_prime({0.0L, 0.0L}, {0.0L, 0.6L}));
    const cplx got = sigma_prime(cplx(0, 0), tau);
    CHECK(std::abs(got) > 1.0);
    CHECK(std::abs(got.imag()) < 1e-13 * std::abs(got));
    CHECK(rel_err(got, want) < 1e-14);

    // 5-point stencil cross-check away from zeros.
    const cplx u5(0.21, 0.13);
    const double h5 = 1e-3;
    const cplx fd5 = (sigma(u5 - 2 * h5, tau) - 8.0 * sigma(u5 - h5, tau)
                      + 8.0 * sigma(u5 + h5, tau) - sigma(u5 + 2 * h5, tau)) / (12 * h5);
    CHECK(std::abs(sigma_prime(u5, tau) - fd5) / std::abs(fd5) < 1e-8);
}

TEST_CASE("identity residuals on random samples", "[elliptic]")
{
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> box(0.05, 0.45);

    for (double im_tau : {0.4, 0.6, 1.6, 4.0}) {
        const LatticeTau tau(cplx(0, im_tau));
        for (int i = 0; i < 25; ++i) {
            const cplx u(box(rng), box(rng)), v(box(rng), -box(rng));
            const cplx x(-box(rng), box(rng)), y(box(rng), box(rng));
            const auto res = identity_residuals(u, v, x, y, tau);
            CHECK(res.max() < 1e-11);
        }
    }

    // Symmetric case u=v, x=y: Riemann LHS second product symmetric.
    const LatticeTau tau(cplx(0, 0.6));
    const cplx u(0.2, 0.1), x(0.15, -0.05);
    CHECK(identity_residuals(u, u, x, x, tau).riemann < 1e-12);

    // Double angle at a point with the larger modulus.
    const LatticeTau tau2(cplx(0, 1.6));
    CHECK(identity_residuals(cplx(0.31, 0.07), cplx(0.1, 0.1), cplx(0.2, 0), cplx(0.1, 0.05),
                             tau2).double_angle < 1e-11);
}

TEST_CASE("truncation stability", "[elliptic]")
{
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> box(-0.5, 0.5);
    const LatticeTau tau(cplx(0, 0.6));
    for (int i = 0; i < 20; ++i) {
        const cplx u(box(rng), box(rng));
        for (auto ch : {ThetaChar::half_half(), ThetaChar::zero_half()}) {
            const cplx narrow = from_ref(ref::theta(ch.a, ch.b,
                {static_cast<long double>(u.real()), static_cast<long double>(u.imag())},
                {0.0L, 0.6L}, 25));
            const cplx wide = from_ref(ref::theta(ch.a, ch.b,
                {static_cast<long double>(u.real()), static_cast<long double>(u.imag())},
                {0.0L, 0.6L}, 50));
            const cplx lib = theta(ch, u, tau);
            const double scale = std::max(1.0, std::abs(wide));
            CHECK(std::abs(narrow - wide) / scale < 1e-13);
            CHECK(std::abs(lib - wide) / scale < 1e-13);
        }
    }
}

TEST_CASE("domain errors", "[elliptic]")
{
    CHECK_THROWS_AS(LatticeTau(cplx(0.5, 0)), std::domain_error);
    CHECK_THROWS_AS(LatticeTau(cplx(0, -0.6)), std::domain_error);

    const LatticeTau tau(cplx(0, 0.6));
    CHECK_THROWS_AS(zeta(cplx(0, 0), tau), std::domain_error);
    CHECK_THROWS_AS(zeta(cplx(1.0, 0.6), tau), std::domain_error);
    CHECK_THROWS_AS(theta(ThetaChar::half_half(), cplx(0.1, 0), tau, 1e-3), std::domain_error);
}
