#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace xyzopen {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Theta functions with rational characteristics,
//
//   theta[a,b](u,tau) = sum_m exp(i pi (m+a)^2 tau + 2 i pi (m+a)(u+b)),
//
// together with sigma(u) = theta[1/2,1/2](u,tau), its term-wise derivative
// and the logarithmic derivative zeta(u) = sigma'(u)/sigma(u).  All series
// are truncated adaptively: the window is grown symmetrically around the
// Gaussian peak of the summand until the first omitted term is below
// eps times the largest retained one.
namespace elliptic {

inline constexpr double kDefaultEps = 1e-15;

/// Lattice modulus; construction rejects Im(tau) <= 0 (series diverges).
struct LatticeTau {
    cplx value;

    explicit LatticeTau(cplx tau) : value(tau) {
        if (!(tau.imag() > 0.0) || !std::isfinite(tau.imag()) || !std::isfinite(tau.real()))
            throw std::domain_error("LatticeTau: Im(tau) must be positive and finite");
    }

    LatticeTau doubled() const { return LatticeTau(2.0 * value); }
};

/// Rational characteristics (a,b); only 0 and 1/2 appear in this model.
struct ThetaChar {
    double a = 0.0;
    double b = 0.0;

    static constexpr ThetaChar half_half() { return {0.5, 0.5}; }
    static constexpr ThetaChar zero_half() { return {0.0, 0.5}; }
};

namespace detail {

template <class R>
struct series_result {
    std::complex<R> value{};
    std::complex<R> derivative{};  // term-wise d/du
};

// Core theta sum over m in [mc-K, mc+K], K grown until both edge terms are
// negligible against the largest retained term.  Works for any real type;
// long double instances back the reference oracles in the test suite.
template <class R>
series_result<R> theta_series(R a, R b, std::complex<R> u, std::complex<R> tau, R eps)
{
    using C = std::complex<R>;
    const R pi = static_cast<R>(std::numbers::pi_v<long double>);
    const C i_pi(0, pi);

    auto term = [&](long m) -> C {
        const R ma = static_cast<R>(m) + a;
        return std::exp(i_pi * (ma * ma) * tau + R(2) * i_pi * ma * (u + b));
    };

    // Gaussian envelope peaks near m = -a - Im(u+b)/Im(tau).
    const long mc = std::lround(static_cast<double>(-a - std::imag(u + b) / std::imag(tau)));

    C sum = term(mc);
    C dsum = R(2) * i_pi * (R(mc) + a) * sum;
    R max_mag = std::abs(sum);

    constexpr long k_max = 100000;
    long k = 1;
    for (; k <= k_max; ++k) {
        const C tp = term(mc + k);
        const C tm = term(mc - k);
        sum += tp + tm;
        dsum += R(2) * i_pi * ((R(mc + k) + a) * tp + (R(mc - k) + a) * tm);
        const R mp = std::abs(tp), mm = std::abs(tm);
        max_mag = std::max(max_mag, std::max(mp, mm));
        if (k >= 2 && mp < eps * max_mag && mm < eps * max_mag) break;
    }
    if (k > k_max) throw std::runtime_error("theta_series: truncation window exceeded");
    return {sum, dsum};
}

inline void check_eps(double eps)
{
    if (!(eps > 0.0) || eps > 1e-6)
        throw std::domain_error("theta: eps must lie in (0, 1e-6]");
}

// Distance from u to the nearest point of the lattice Z + tau Z.
inline double lattice_distance(cplx u, cplx tau)
{
    const double y = u.imag() / tau.imag();
    const double x = u.real() - y * tau.real();
    const double dx = x - std::round(x);
    const double dy = y - std::round(y);
    return std::abs(dx + dy * tau);
}

}  // namespace detail

inline cplx theta(const ThetaChar& ch, cplx u, const LatticeTau& tau, double eps = kDefaultEps)
{
    detail::check_eps(eps);
    return detail::theta_series<double>(ch.a, ch.b, u, tau.value, eps).value;
}

/// Term-wise analytic derivative d/du of the theta series (no differencing).
inline cplx theta_du(const ThetaChar& ch, cplx u, const LatticeTau& tau, double eps = kDefaultEps)
{
    detail::check_eps(eps);
    return detail::theta_series<double>(ch.a, ch.b, u, tau.value, eps).derivative;
}

inline cplx sigma(cplx u, const LatticeTau& tau, double eps = kDefaultEps)
{
    return theta(ThetaChar::half_half(), u, tau, eps);
}

inline cplx sigma_prime(cplx u, const LatticeTau& tau, double eps = kDefaultEps)
{
    return theta_du(ThetaChar::half_half(), u, tau, eps);
}

/// zeta(u) = sigma'(u)/sigma(u); throws on (near-)lattice points where sigma
/// vanishes.  All logarithmic derivatives in the package go through here, so
/// no branch of log(theta) is ever taken.
inline cplx zeta(cplx u, const LatticeTau& tau, double eps = kDefaultEps)
{
    if (detail::lattice_distance(u, tau.value) < 1e-10)
        throw std::domain_error("zeta: pole at a lattice point");
    const auto sr = detail::theta_series<double>(0.5, 0.5, u, tau.value, eps);
    return sr.derivative / sr.value;
}

/// Normalized residuals of the identities used throughout the derivations:
/// Riemann four-sigma identity, the double-angle factorization and the two
/// quasi-periodicity shifts.  Each entry is |LHS-RHS| / max(|LHS|,|RHS|,1).
struct IdentityResiduals {
    double riemann;
    double double_angle;
    double shift_one;
    double shift_tau;

    double max() const
    {
        return std::max(std::max(riemann, double_angle), std::max(shift_one, shift_tau));
    }
};

inline IdentityResiduals identity_residuals(cplx u, cplx v, cplx x, cplx y,
                                            const LatticeTau& tau, double eps = kDefaultEps)
{
    auto sg = [&](cplx z) { return sigma(z, tau, eps); };
    auto rel = [](cplx lhs, cplx rhs) {
        return std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1.0});
    };
    const cplx t = tau.value;

    const cplx riem_lhs = sg(u + x) * sg(u - x) * sg(v + y) * sg(v - y)
                        - sg(u + y) * sg(u - y) * sg(v + x) * sg(v - x);
    const cplx riem_rhs = sg(u + v) * sg(u - v) * sg(x + y) * sg(x - y);

    const cplx da_lhs = sg(2.0 * u);
    const cplx da_rhs = 2.0 * sg(u) * sg(u + 0.5) * sg(u + 0.5 * t) * sg(u - 0.5 * (1.0 + t))
                      / (sg(0.5) * sg(0.5 * t) * sg(-0.5 * (1.0 + t)));

    const cplx s1_lhs = sg(u + 1.0);
    const cplx s1_rhs = -sg(u);

    const cplx st_lhs = sg(u + t);
    const cplx st_rhs = -std::exp(cplx(0, -2.0 * kPi) * (u + 0.5 * t)) * sg(u);

    return {rel(riem_lhs, riem_rhs), rel(da_lhs, da_rhs), rel(s1_lhs, s1_rhs), rel(st_lhs, st_rhs)};
}

// Extended-precision reference evaluators.  These back the frozen expected
// values in the tests; production code never calls them.
namespace ref {

using lcplx = std::complex<long double>;

/// Brute-force theta sum with a fixed half-width (default 200 terms each way).
inline lcplx theta(long double a, long double b, lcplx u, lcplx tau, long half_width = 200)
{
    const long double pi = std::numbers::pi_v<long double>;
    const lcplx i_pi(0, pi);
    lcplx sum = 0;
    for (long m = -half_width; m <= half_width; ++m) {
        const long double ma = static_cast<long double>(m) + a;
        sum += std::exp(i_pi * (ma * ma) * tau + 2.0L * i_pi * ma * (u + b));
    }
    return sum;
}

inline lcplx theta_du(long double a, long double b, lcplx u, lcplx tau, long half_width = 200)
{
    const long double pi = std::numbers::pi_v<long double>;
    const lcplx i_pi(0, pi);
    lcplx sum = 0;
    for (long m = -half_width; m <= half_width; ++m) {
        const long double ma = static_cast<long double>(m) + a;
        sum += 2.0L * i_pi * ma * std::exp(i_pi * (ma * ma) * tau + 2.0L * i_pi * ma * (u + b));
    }
    return sum;
}

inline lcplx sigma(lcplx u, lcplx tau, long half_width = 200)
{
    return theta(0.5L, 0.5L, u, tau, half_width);
}

inline lcplx sigma_prime(lcplx u, lcplx tau, long half_width = 200)
{
    return theta_du(0.5L, 0.5L, u, tau, half_width);
}

}  // namespace ref

}  // namespace elliptic
}  // namespace xyzopen
