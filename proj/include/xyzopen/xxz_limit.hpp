#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "xyzopen/lattice.hpp"
#include "xyzopen/thermo.hpp"

// Trigonometric (tau -> i inf) limit: the open XXZ chain.  Degenerate
// couplings and boundary fields, plus the closed-form surface and excitation
// energies: integrals over the real line for |J_z| < 1 (real eta) and
// exponential series for |J_z| > 1 (pure imaginary eta).
namespace xyzopen::xxz {

using lattice::CouplingSet;
using thermo::EnergyBreakdown;
using thermo::Parity;

struct XXZParams {
    cplx eta;  // real for |J_z| < 1, pure imaginary for |J_z| > 1
    std::array<cplx, 3> beta_minus{};
    std::array<cplx, 3> beta_plus{};
    Parity parity = Parity::Even;

    bool real_eta() const { return std::abs(eta.imag()) < 1e-12; }
};

/// J_x = J_y = 1, J_z = cosh(i pi eta), and the degenerate boundary fields.
inline CouplingSet xxz_couplings_and_fields(const XXZParams& p)
{
    const cplx i_pi(0, kPi);
    CouplingSet cs;
    cs.jx = 1.0;
    cs.jy = 1.0;
    cs.jz = std::cosh(i_pi * p.eta);

    auto fields = [&](const std::array<cplx, 3>& b, double sign, cplx& hx, cplx& hy, cplx& hz) {
        const cplx s1 = std::sinh(i_pi * b[0]);
        const cplx c3 = std::cosh(i_pi * b[2]);
        if (std::abs(s1) < 1e-12 || std::abs(c3) < 1e-12)
            throw std::domain_error("xxz_couplings_and_fields: field undefined (pole)");
        const cplx common = std::sinh(i_pi * p.eta) / (s1 * c3);
        hx = sign * cplx(0, 1) * common * std::sinh(i_pi * b[1]);
        hy = sign * common * std::cosh(i_pi * b[1]);
        hz = sign * std::sinh(i_pi * p.eta) * std::cosh(i_pi * b[0]) / s1
           * std::sinh(i_pi * b[2]) / c3;
    };
    fields(p.beta_minus, -1.0, cs.hx_minus, cs.hy_minus, cs.hz_minus);
    fields(p.beta_plus, +1.0, cs.hx_plus, cs.hy_plus, cs.hz_plus);
    return cs;
}

namespace detail {

// cosh(a x)/sinh(x) and cosh(a x)/cosh(b x) without overflowing the
// intermediate hyperbolics.
inline double cosh_over_sinh(double a, double x)
{
    if (x < 20.0) return std::cosh(a * x) / std::sinh(x);
    const double aa = std::abs(a);
    return std::exp((aa - 1.0) * x) * (1.0 + std::exp(-2.0 * aa * x))
         / (1.0 - std::exp(-2.0 * x));
}

inline double cosh_over_cosh(double a, double b, double x)
{
    if (std::abs(b) * x < 350.0) return std::cosh(a * x) / std::cosh(b * x);
    const double aa = std::abs(a), bb = std::abs(b);
    return std::exp((aa - bb) * x) * (1.0 + std::exp(-2.0 * aa * x))
         / (1.0 + std::exp(-2.0 * bb * x));
}

inline double cos_over_sinh(double a, double x)
{
    if (x < 20.0) return std::cos(a * x) / std::sinh(x);
    return std::cos(a * x) * 2.0 * std::exp(-x) / (1.0 - std::exp(-2.0 * x));
}

// Adaptive quadrature of an even integrand over the whole line, truncated
// where the exp(-decay |x|) envelope is below 1e-18.
template <class F>
double integral_even(F&& f, double decay, double eps)
{
    namespace bq = boost::math::quadrature;
    const double cut = 42.0 / std::max(decay, 1e-3) + 10.0;
    double err = 0;
    const double half = bq::gauss_kronrod<double, 15>::integrate(f, 0.0, cut, 15, eps, &err);
    if (!(err < 1e-7 * std::max(1.0, std::abs(half))))
        throw std::runtime_error("xxz quadrature did not converge");
    return 2.0 * half;
}

inline double require_real(cplx v, const char* what)
{
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error(std::string(what) + ": non-negligible imaginary part");
    return v.real();
}

}  // namespace detail

/// Closed forms for real eta in (0,1) \ {1/2}: quadrature of the printed
/// integrals; the excitation is identically zero (gapless boundary
/// rearrangement), and no string enumeration exists on this branch.
inline EnergyBreakdown xxz_energies_real(const XXZParams& p, double eps = 1e-12)
{
    if (!p.real_eta()) throw std::domain_error("xxz_energies_real: eta must be real");
    const double eta = p.eta.real();
    if (!(eta > 0 && eta < 1) || std::abs(eta - 0.5) < 1e-10)
        throw std::domain_error("xxz_energies_real: eta outside (0,1) or at 1/2");

    const double sin_eta = std::sin(kPi * eta);
    const double abs_1m2e = std::abs(1.0 - 2.0 * eta);

    EnergyBreakdown out;
    {
        auto f = [&](double x) {
            if (std::abs(x) < 1e-10) return eta;
            return std::tanh(x * eta) * detail::cosh_over_sinh(1.0 - 2.0 * eta, x);
        };
        out.e_bulk = -2.0 * sin_eta / kPi * detail::integral_even(f, 1.0 - abs_1m2e, eps)
                     - std::cos(kPi * eta);
    }
    {
        const double c2 = ((1.0 - 2.0 * eta) * (1.0 - 2.0 * eta)
                           + (1.0 - abs_1m2e) * (1.0 - abs_1m2e) - (1.0 - eta) * (1.0 - eta)
                           - eta * eta) / 2.0;
        auto f = [&](double x) {
            if (std::abs(x) < 1e-6) return eta * c2 * x * x;
            const double brace = detail::cosh_over_sinh(1.0 - 2.0 * eta, x)
                               + detail::cosh_over_sinh(1.0 - abs_1m2e, x)
                               - detail::cosh_over_sinh(1.0 - eta, x)
                               - detail::cosh_over_sinh(eta, x);
            return std::tanh(eta * x) * brace;
        };
        const double decay = 1.0 - std::max({abs_1m2e, 1.0 - abs_1m2e, 1.0 - eta, eta});
        out.e_free = -sin_eta / kPi * detail::integral_even(f, std::max(decay, 0.05), eps)
                   + std::cos(kPi * eta) - 2.0 * sin_eta / std::tan(2.0 * kPi * eta);
    }
    auto field_term = [&](const std::array<cplx, 3>& b) {
        const double b1 = b[0].real(), b3 = b[2].imag();
        auto f = [&](double x) {
            if (std::abs(x) < 1e-10) return eta * 2.0;
            return std::tanh(eta * x)
                 * (detail::cosh_over_sinh(1.0 - 2.0 * b1, x) + detail::cos_over_sinh(2.0 * b3, x));
        };
        return -sin_eta / kPi * detail::integral_even(f, 2.0 * b1, eps);
    };
    out.e_left = field_term(p.beta_minus);
    out.e_right = field_term(p.beta_plus);

    out.surface = out.e_free + out.e_left + out.e_right;
    if (eta > 0.5) {
        // the fixed root (1-eta)/2 i stays inside the band and contributes
        auto f = [&](double x) { return detail::cosh_over_cosh(1.0 - eta, eta, x); };
        const double ew = 2.0 * sin_eta / kPi * detail::integral_even(f, 2.0 * eta - 1.0, eps);
        out.e_strings.emplace_back(cplx(0, 0.5 * (1.0 - eta)), ew);
        out.surface += ew;
    }
    out.excitation = 0.0;
    return out;
}

namespace detail {

inline std::pair<XXZParams, bool> canonicalize_imag(const XXZParams& p)
{
    XXZParams q = p;
    bool flip = false;
    cplx b = q.beta_plus[0];
    b -= std::round(b.real());  // the +1 move changes nothing
    if (b.imag() < 0) {         // beta+_1 -> -beta+_1 swaps the parity
        b = -b;
        flip = true;
    }
    q.beta_plus[0] = b;
    if (!(q.beta_plus[0].imag() > 0) || !(q.beta_minus[0].imag() > 0))
        throw std::domain_error("xxz_energies_imag: Im(beta_1) must be nonzero");
    return {q, flip};
}

}  // namespace detail

/// Closed forms for pure imaginary eta (|J_z| > 1): exponential series and
/// the minI/maxI boundary-string laws.
inline EnergyBreakdown xxz_energies_imag(const XXZParams& p_in, double eps = 1e-12)
{
    if (p_in.real_eta() || !(p_in.eta.imag() > 0))
        throw std::domain_error("xxz_energies_imag: eta must be pure imaginary, Im > 0");
    auto [p, parity_flip] = detail::canonicalize_imag(p_in);
    const Parity parity = parity_flip
                              ? (p_in.parity == Parity::Even ? Parity::Odd : Parity::Even)
                              : p_in.parity;

    const cplx i_pi(0, kPi);
    const cplx eta = p.eta;
    const double y = eta.imag();
    const cplx sh = std::sinh(i_pi * eta);
    thermo::detail::SeriesOptions so{eps, 2000000};

    EnergyBreakdown out;
    {
        const cplx s = thermo::detail::sum_series([&](long k) {
            return std::tanh(double(k) * i_pi * eta) * std::exp(2.0 * double(k) * i_pi * eta);
        }, so);
        out.e_bulk = detail::require_real(-4.0 * sh * s - std::cosh(i_pi * eta), "xxz e_bulk");
    }
    {
        const cplx s = thermo::detail::sum_series([&](long k) {
            return std::tanh(2.0 * double(k) * i_pi * eta)
                 * (-std::exp(4.0 * double(k) * i_pi * eta)
                    + std::exp(2.0 * double(k) * i_pi * eta));
        }, so);
        // constant part: cosh(i pi eta) - 2 sinh(i pi eta) coth(2 i pi eta),
        // the tau -> i inf limit of sigma'(eta)/sigma'(0) - 2 pref zeta(2 eta)
        const cplx const_part = std::cosh(i_pi * eta)
                              - 2.0 * sh * std::cosh(2.0 * i_pi * eta)
                                    / std::sinh(2.0 * i_pi * eta);
        out.e_free = detail::require_real(4.0 * sh * s + const_part, "xxz e_free");
    }
    auto field_term = [&](const std::array<cplx, 3>& b) {
        const double s1 = b[0].imag(), s3 = b[2].imag();
        const bool split = s3 < 0.2;  // Grandi corner at beta_3 = 0
        const double closed = split ? -1.0 / (std::exp(2.0 * kPi * s3) + 1.0) : 0.0;
        const cplx s = thermo::detail::sum_series([&](long k) {
            const double alt = (k % 2 == 0) ? 1.0 : -1.0;
            cplx term = std::tanh(double(k) * i_pi * eta)
                      * (std::exp(2.0 * double(k) * i_pi * b[0])
                         + std::exp(2.0 * double(k) * i_pi * b[2]) * alt);
            if (split) term -= -alt * std::exp(-2.0 * kPi * s3 * k);
            return term;
        }, so);
        (void)s1;
        return detail::require_real(-2.0 * sh * (s - closed), "xxz field");
    };
    out.e_left = field_term(p.beta_minus);
    out.e_right = field_term(p.beta_plus);

    auto root_energy = [&](cplx w) {
        const int ds = thermo::sign_im(w + 0.5 * eta) - thermo::sign_im(w - 0.5 * eta);
        if (ds == 0) return 0.0;
        if (std::abs(std::abs(w.imag()) - 0.5 * y) < 1e-12) return 0.0;
        const cplx s = thermo::detail::sum_series([&](long k) {
            return std::cosh(2.0 * double(k) * i_pi * w) / std::cosh(double(k) * i_pi * eta);
        }, so);
        return detail::require_real(-double(ds) * sh * (1.0 + 2.0 * s), "xxz root energy");
    };

    using thermo::detail::max_im;
    using thermo::detail::min_im;
    const cplx b3m = p.beta_minus[2], b3p = p.beta_plus[2];
    cplx wg_m, wg_p, we_m, we_p;
    if (parity == Parity::Even) {
        const cplx phi_b = min_im({0.5 * eta + b3m, eta});
        wg_m = 0.5 + phi_b;
        wg_p = 0.5 - min_im({0.5 * eta + b3p, 2.0 * eta - phi_b});
        we_m = 0.5 + max_im({0.5 * eta - b3m, cplx(0, 0)});
        we_p = 0.5 - max_im({0.5 * eta - b3p, cplx(0, 0)});
    } else {
        wg_m = 0.5 + max_im({0.5 * eta - b3m, cplx(0, 0)});
        wg_p = 0.5 - min_im({0.5 * eta + b3p, 1.5 * eta + b3m});
        we_m = 0.5 + 0.5 * eta + b3m;
        we_p = 0.5 - max_im({0.5 * eta - b3p, cplx(0, 0)});
    }

    const double eg_m = root_energy(wg_m), eg_p = root_energy(wg_p);
    out.e_strings.emplace_back(wg_m, eg_m);
    out.e_strings.emplace_back(wg_p, eg_p);

    double parity_term = 0;
    if (parity == Parity::Odd) parity_term = root_energy(cplx(0.5, 0));

    out.surface = out.e_free + out.e_left + out.e_right + eg_m + eg_p - parity_term;
    out.excitation = root_energy(we_m) + root_energy(we_p) - eg_m - eg_p;
    return out;
}

enum class XXZTransform { B1PlusOne, B1Negate };

enum class XXZTransformEffect { Invariant, ParitySwapEquivalent };

/// Effect of the remaining beta+_1 moves on the |J_z| > 1 branch.
inline XXZTransformEffect transform_rules_xxz(const XXZParams& p, XXZTransform kind)
{
    if (p.real_eta())
        throw std::domain_error("transform_rules_xxz: defined on the imaginary-eta branch");
    return kind == XXZTransform::B1PlusOne ? XXZTransformEffect::Invariant
                                           : XXZTransformEffect::ParitySwapEquivalent;
}

}  // namespace xyzopen::xxz
