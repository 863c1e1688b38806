#pragma once

#include <map>
#include <string>
#include <vector>

#include "xyzopen/lattice.hpp"

// Closed-form thermodynamic-limit quantities: Fourier kernels, bulk root
// densities, the energy components (bulk density, free-boundary, boundary
// fields, discrete roots), the boundary-string selection laws for every
// regime/parity/state, and the assembled surface and excitation energies.
//
// Geometry conventions.  For real eta everything lives in the zbar-plane
// (z = i zbar): bulk roots on the line Im(zbar) = 1/2 or conjugate pairs
// x +- eta i, discrete roots w given as zbar values, energy band
// |Im(w)| < eta/2.  For imaginary eta the z-plane is used directly and the
// band is |Im(w)| < Im(eta)/2.
namespace xyzopen::thermo {

using lattice::EtaKind;
using lattice::ModelParams;

enum class SubRegime { Large, Small };
enum class Parity { Even, Odd };
enum class StateKind { Ground, FirstExcited };

inline Parity parity_of(int n_sites) { return n_sites % 2 == 0 ? Parity::Even : Parity::Odd; }

/// (eta kind) x (sub-interval) x (parity) x (state) selector driving the
/// kernel choice and the boundary-string laws.
struct RegimeDispatch {
    EtaKind eta_kind;
    SubRegime sub;
    Parity parity;
    StateKind state;
};

inline RegimeDispatch make_dispatch(const ModelParams& p, Parity parity,
                                    StateKind state = StateKind::Ground)
{
    const double tol = 1e-10;
    SubRegime sub;
    if (p.eta_kind == EtaKind::Real) {
        const double e = p.eta.real();
        if (std::abs(e - 0.5) < tol)
            throw std::domain_error("make_dispatch: eta = 1/2 sits on a regime boundary");
        sub = e > 0.5 ? SubRegime::Large : SubRegime::Small;
    } else {
        const double e = p.eta.imag(), half = 0.5 * p.tau.value.imag();
        if (std::abs(e - half) < tol)
            throw std::domain_error("make_dispatch: Im(eta) = Im(tau)/2 sits on a regime boundary");
        sub = e > half ? SubRegime::Large : SubRegime::Small;
    }
    return {p.eta_kind, sub, parity, state};
}

inline RegimeDispatch make_dispatch(const ModelParams& p, StateKind state = StateKind::Ground)
{
    return make_dispatch(p, parity_of(p.n_sites), state);
}

// ---------------------------------------------------------------------------
// Fourier kernels
// ---------------------------------------------------------------------------

enum class KernelKind { A, B, C, D };

/// Three-way sign of the imaginary part.
inline int sign_im(cplx v)
{
    if (v.imag() > 1e-13) return 1;
    if (v.imag() < -1e-13) return -1;
    return 0;
}

/// Fourier coefficients of the periodic kernels.  A and B take the real-eta
/// convention (shift gamma, Im in [-1,1], Re in [-tau/2i, tau/2i]); C and D
/// the imaginary-eta one (shift xi, Im in [-tau/i, tau/i], Re in [-1/2,1/2]).
namespace detail {

// cosh(x) coth(kappa) + s sinh(x) and sinh(x) coth(kappa) + s cosh(x) in
// overflow-safe exponential form; valid for Re(kappa) > 0 and requires the
// sign branch s to match the shift (which the strip bounds guarantee).
// Exponents are combined before exponentiation so neither factor overflows
// on its own.
inline cplx bracket_cosh_lead(cplx x, cplx kappa, int s)
{
    const cplx q2 = std::exp(-2.0 * kappa);
    if (s > 0) return (std::exp(x) + std::exp(-x - 2.0 * kappa)) / (1.0 - q2);
    if (s < 0) return (std::exp(x - 2.0 * kappa) + std::exp(-x)) / (1.0 - q2);
    return std::cosh(x) * (1.0 + q2) / (1.0 - q2);
}

inline cplx bracket_sinh_lead(cplx x, cplx kappa, int s)
{
    const cplx q2 = std::exp(-2.0 * kappa);
    if (s > 0) return (std::exp(x) - std::exp(-x - 2.0 * kappa)) / (1.0 - q2);
    if (s < 0) return (std::exp(x - 2.0 * kappa) - std::exp(-x)) / (1.0 - q2);
    return std::sinh(x) * (1.0 + q2) / (1.0 - q2);
}

}  // namespace detail

inline cplx kernel_fourier(KernelKind kind, cplx shift, int k, cplx tau)
{
    const double im_tau = tau.imag();
    const double two_pi = 2 * kPi;
    const int s = sign_im(shift);
    const int ka = std::abs(k);

    // A and C are odd in k, B and D even; evaluate at |k| where the
    // exponential forms decay.
    if (kind == KernelKind::A || kind == KernelKind::B) {
        if (std::abs(shift.imag()) > 1.0 + 1e-12 || std::abs(shift.real()) > 0.5 * im_tau + 1e-12)
            throw std::domain_error("kernel_fourier: shift outside the A/B strip");
        if (k == 0)
            return kind == KernelKind::A ? cplx(0, 0)
                                         : two_pi * (2.0 * shift * cplx(0, 1) + double(s));
        const cplx kappa = cplx(0, ka * kPi) / tau;          // Re > 0 for Im(tau) > 0
        const cplx x = kappa * 2.0 * shift * cplx(0, 1);
        if (kind == KernelKind::A) {
            const cplx val = -two_pi * detail::bracket_cosh_lead(x, kappa, s);
            return k < 0 ? -val : val;
        }
        return two_pi * detail::bracket_sinh_lead(x, kappa, s);
    }

    if (std::abs(shift.imag()) > im_tau + 1e-12 || std::abs(shift.real()) > 0.5 + 1e-12)
        throw std::domain_error("kernel_fourier: shift outside the C/D strip");
    if (k == 0) return kind == KernelKind::C ? cplx(0, 0) : cplx(0, two_pi * s);
    const cplx kappa = -cplx(0, ka * kPi) * tau;             // -i|k| pi tau, Re > 0
    const cplx y = cplx(0, 2.0 * ka * kPi) * shift;
    if (kind == KernelKind::C) {
        const cplx val = cplx(0, -two_pi) * detail::bracket_cosh_lead(y, kappa, s);
        return k < 0 ? -val : val;
    }
    return cplx(0, two_pi) * detail::bracket_sinh_lead(y, kappa, s);
}

namespace detail {

// The kernels are periodic under gamma -> gamma + i (A/B) and
// xi -> xi + tau (C/D); reduce into the principal strip.
inline cplx reduce_shift_ab(cplx gamma)
{
    return gamma - cplx(0, std::round(gamma.imag()));
}

inline cplx reduce_shift_cd(cplx xi, double im_tau)
{
    return xi - cplx(0, im_tau * std::round(xi.imag() / im_tau));
}

struct SeriesOptions {
    double eps = 1e-12;
    long k_max = 2000000;
};

// sum_{k>=1} f(k), terminated after five consecutive terms below
// eps * |partial sum|.
template <class F>
cplx sum_series(F&& f, const SeriesOptions& o)
{
    cplx sum(0, 0);
    int quiet = 0;
    for (long k = 1; k <= o.k_max; ++k) {
        const cplx t = f(k);
        sum += t;
        const double mag = std::abs(t);
        if (!std::isfinite(mag) || mag > 1e12 * (1.0 + std::abs(sum)))
            throw std::runtime_error("sum_series: divergent term (invalid parameters)");
        if (mag < o.eps * std::max(std::abs(sum), 1e-300)) {
            if (++quiet >= 5) return sum;
        } else {
            quiet = 0;
        }
    }
    throw std::runtime_error("sum_series: no convergence within k_max terms");
}

inline double require_real(cplx v, const char* what)
{
    if (std::abs(v.imag()) > 1e-9 * std::max(1.0, std::abs(v.real())))
        throw std::runtime_error(std::string(what) + ": non-negligible imaginary part");
    return v.real();
}

inline cplx sigma_prefactor(const ModelParams& p)
{
    return elliptic::sigma(p.eta, p.tau) / elliptic::sigma_prime(cplx(0, 0), p.tau);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Energy components
// ---------------------------------------------------------------------------

/// Energy density in the bulk.
inline double bulk_energy_density(const RegimeDispatch& d, const ModelParams& p, double eps = 1e-12)
{
    const cplx tau = p.tau.value;
    const cplx eta = p.eta;
    const cplx pref = detail::sigma_prefactor(p);
    const cplx zeta_eta = elliptic::zeta(eta, p.tau);
    detail::SeriesOptions so{eps, 2000000};

    if (d.eta_kind == EtaKind::Real) {
        const cplx i_over_tau = cplx(0, 1) / tau;
        const cplx series = detail::sum_series([&](long k) {
            const cplx kap = cplx(0, k * kPi) / tau;
            return std::tanh(kap * eta) * std::cosh(kap * (1.0 - 2.0 * eta)) / std::sinh(kap);
        }, so);
        const cplx val = -pref * (4.0 * kPi * i_over_tau * series
                                  + i_over_tau * 2.0 * kPi * eta + zeta_eta);
        return detail::require_real(val, "bulk_energy_density");
    }
    const cplx series = detail::sum_series([&](long k) {
        const cplx ik_pi = cplx(0, k * kPi);
        return std::tanh(ik_pi * eta) * std::cosh(ik_pi * (tau - 2.0 * eta)) / std::sinh(ik_pi * tau);
    }, so);
    const cplx val = pref * (cplx(0, 4.0 * kPi) * series - zeta_eta);
    return detail::require_real(val, "bulk_energy_density");
}

/// Contribution of the free open boundaries.
inline double free_boundary_energy(const RegimeDispatch& d, const ModelParams& p, double eps = 1e-12)
{
    const cplx tau = p.tau.value;
    const cplx eta = p.eta;
    const cplx pref = detail::sigma_prefactor(p);
    const cplx const_part = elliptic::sigma_prime(eta, p.tau) / elliptic::sigma_prime(cplx(0, 0), p.tau)
                          - 2.0 * pref * elliptic::zeta(2.0 * eta, p.tau);
    detail::SeriesOptions so{eps, 2000000};

    if (d.eta_kind == EtaKind::Real) {
        const cplx series = detail::sum_series([&](long k) {
            if (k % 2 != 0) return cplx(0, 0);  // the (1 + cos k pi) factor
            const cplx kap = cplx(0, k * kPi) / tau;
            const cplx brace = std::cosh(kap * (1.0 - 2.0 * eta))
                             + std::cosh(kap * (1.0 - std::abs(1.0 - 2.0 * eta.real())))
                             - std::cosh(kap * (1.0 - eta)) - std::cosh(kap * eta);
            return 2.0 * std::tanh(kap * eta) / std::sinh(kap) * brace;
        }, so);
        const cplx val = -2.0 * kPi * pref * cplx(0, 1) / tau * series + const_part;
        return detail::require_real(val, "free_boundary_energy");
    }
    const double gap = std::abs((tau - 2.0 * eta).imag());
    const cplx series = detail::sum_series([&](long k) {
        if (k % 2 != 0) return cplx(0, 0);
        const cplx ik_pi = cplx(0, k * kPi);
        const cplx brace = std::cosh(ik_pi * (tau - 2.0 * eta))
                         + std::cosh(ik_pi * (tau - cplx(0, gap)))
                         - std::cosh(ik_pi * (tau - eta)) - std::cosh(ik_pi * eta);
        return 2.0 * std::tanh(ik_pi * eta) / std::sinh(ik_pi * tau) * brace;
    }, so);
    const cplx val = cplx(0, 2.0 * kPi) * pref * series + const_part;
    return detail::require_real(val, "free_boundary_energy");
}

enum class Side { Plus, Minus };

/// Energy induced by the boundary magnetic field on one edge.
inline double field_boundary_energy(const RegimeDispatch& d, const ModelParams& p, Side side,
                                    double eps = 1e-12)
{
    const cplx tau = p.tau.value;
    const cplx eta = p.eta;
    const cplx pref = detail::sigma_prefactor(p);
    const auto& b = (side == Side::Plus) ? p.beta_plus : p.beta_minus;
    detail::SeriesOptions so{eps, 2000000};

    // The beta_2 (real eta) resp. beta_3 (imaginary eta) piece alternates
    // and its terms decay only like exp(-2 beta k pi / t); at the region
    // corner beta = 0 it degenerates to a Grandi sum.  Its geometric
    // asymptote is split off and summed in closed form, which is also the
    // Abel value at the corner.
    if (d.eta_kind == EtaKind::Real) {
        const double t = tau.imag();
        const double b2 = b[1].real();
        const bool split = b2 < 0.2;
        const double closed = split ? -1.0 / (std::exp(2.0 * b2 * kPi / t) + 1.0) : 0.0;
        const cplx series = detail::sum_series([&](long k) {
            const cplx kap = cplx(0, k * kPi) / tau;
            const double alt = (k % 2 == 0) ? 1.0 : -1.0;
            cplx brace = std::cosh(2.0 * kap * (0.5 - b[0]))
                       + std::cosh(2.0 * kap * (0.5 - b[1])) * alt
                       + std::cosh(2.0 * kap * b[2]);
            cplx term = std::tanh(kap * eta) / std::sinh(kap) * brace;
            if (split) term -= alt * std::exp(-2.0 * b2 * k * kPi / t);
            return term;
        }, so);
        const cplx val = -pref * 2.0 * kPi * cplx(0, 1) / tau * (series + closed)
                       - pref * cplx(0, 1) / tau * 3.0 * kPi * eta;
        return detail::require_real(val, "field_boundary_energy");
    }
    const double s3 = b[2].imag();
    const bool split = s3 < 0.2;
    const double closed = split ? -1.0 / (std::exp(2.0 * kPi * s3) + 1.0) : 0.0;
    const cplx series = detail::sum_series([&](long k) {
        const cplx ik_pi = cplx(0, k * kPi);
        const double alt = (k % 2 == 0) ? 1.0 : -1.0;
        cplx brace = std::cosh(2.0 * ik_pi * (0.5 * tau - b[0]))
                   + std::cosh(2.0 * ik_pi * b[1])
                   + std::cosh(2.0 * ik_pi * (0.5 * tau - b[2])) * alt;
        cplx term = std::tanh(ik_pi * eta) / std::sinh(ik_pi * tau) * brace;
        if (split) term -= alt * std::exp(-2.0 * kPi * s3 * k);
        return term;
    }, so);
    const cplx val = cplx(0, 2.0 * kPi) * pref * (series + closed);
    return detail::require_real(val, "field_boundary_energy");
}

namespace detail {

// sI(w + band) - sI(w - band) for a discrete root; zero outside the band.
inline int band_sign_difference(cplx w, double half_band)
{
    return sign_im(w + cplx(0, half_band)) - sign_im(w - cplx(0, half_band));
}

}  // namespace detail

/// Energy carried by one discrete root.  Exactly zero when the sign-function
/// prefactor vanishes (root outside the band), and zero by continuity on the
/// band edge itself.
inline double discrete_root_energy(const RegimeDispatch& d, const ModelParams& p, cplx w,
                                   double eps = 1e-12)
{
    const cplx tau = p.tau.value;
    const cplx eta = p.eta;
    const double half_band = (d.eta_kind == EtaKind::Real) ? 0.5 * eta.real() : 0.5 * eta.imag();

    const int dsign = detail::band_sign_difference(w, half_band);
    if (dsign == 0) return 0.0;
    if (std::abs(std::abs(w.imag()) - half_band) < 1e-12) return 0.0;  // edge limit

    const cplx pref = detail::sigma_prefactor(p);
    detail::SeriesOptions so{eps, 2000000};

    if (d.eta_kind == EtaKind::Real) {
        const cplx series = detail::sum_series([&](long k) {
            const cplx kap = cplx(0, k * kPi) / tau;
            return std::cosh(kap * 2.0 * w * cplx(0, 1)) / std::cosh(kap * eta);
        }, so);
        const cplx val = double(dsign) * pref * cplx(0, kPi) / tau * (1.0 + 2.0 * series);
        return detail::require_real(val, "discrete_root_energy");
    }
    const cplx series = detail::sum_series([&](long k) {
        const cplx ik_pi = cplx(0, k * kPi);
        return std::cosh(ik_pi * 2.0 * w) / std::cosh(ik_pi * eta);
    }, so);
    const cplx val = -cplx(0, kPi) * double(dsign) * pref * (1.0 + 2.0 * series);
    return detail::require_real(val, "discrete_root_energy");
}

// ---------------------------------------------------------------------------
// Boundary-string selection
// ---------------------------------------------------------------------------

/// Discrete roots selected for one dispatch: the parameter-independent fixed
/// pair plus edge strings, split into energy-carrying and inert ones, with
/// the helper values of the min/max selector laws.
struct StringSet {
    std::vector<cplx> contributing;
    std::vector<cplx> inert;
    std::map<std::string, cplx> helpers;

    std::vector<cplx> all() const
    {
        std::vector<cplx> out = contributing;
        out.insert(out.end(), inert.begin(), inert.end());
        return out;
    }
};

namespace detail {

inline cplx min_im(std::initializer_list<cplx> xs)
{
    cplx best = *xs.begin();
    for (const cplx& x : xs)
        if (x.imag() < best.imag()) best = x;
    return best;
}

inline cplx max_im(std::initializer_list<cplx> xs)
{
    cplx best = *xs.begin();
    for (const cplx& x : xs)
        if (x.imag() > best.imag()) best = x;
    return best;
}

}  // namespace detail

/// Maps beta+_1 into the canonical region by the declared transformations;
/// a parity flip is reported when the move is the parity-swap one.  Other
/// out-of-region components are rejected.
inline std::pair<ModelParams, bool> canonicalize(const ModelParams& p)
{
    const double tol = 1e-12;
    const double im_tau = p.tau.value.imag();
    ModelParams q = p;
    bool parity_flip = false;
    cplx b = q.beta_plus[0];

    if (p.eta_kind == EtaKind::Real) {
        if (std::abs(b.imag() - im_tau) < tol) b -= p.tau.value;  // invariant move
        if (std::abs(b.imag()) > tol)
            throw std::domain_error("canonicalize: Im(beta+_1) not reducible");
        double re = b.real() - 2.0 * std::floor(b.real() / 2.0);
        if (re > 1.0 + tol) {
            re -= 1.0;  // inverse of the +1 move: parity swap
            parity_flip = true;
        }
        if (re > 0.5 + tol) re = 1.0 - re;  // reflection, invariant
        if (re < tol) throw std::domain_error("canonicalize: beta+_1 at a pole of the laws");
        b = cplx(re, 0);
    } else {
        if (std::abs(b.real() - 1.0) < tol) b -= 1.0;  // invariant move
        if (std::abs(b.real()) > tol)
            throw std::domain_error("canonicalize: Re(beta+_1) not reducible");
        double im = b.imag() - 2.0 * im_tau * std::floor(b.imag() / (2.0 * im_tau));
        if (im > im_tau + tol) {
            im -= im_tau;  // inverse of the +tau move: parity swap
            parity_flip = true;
        }
        if (im > 0.5 * im_tau + tol) im = im_tau - im;  // reflection, invariant
        if (im < tol) throw std::domain_error("canonicalize: beta+_1 at a pole of the laws");
        b = cplx(0, im);
    }
    q.beta_plus[0] = b;

    // Remaining components must already be canonical.
    auto expect = [&](bool ok, const char* what) {
        if (!ok) throw std::domain_error(std::string("canonicalize: ") + what
                                         + " outside the canonical region");
    };
    for (const auto* bs : {&q.beta_minus, &q.beta_plus}) {
        const auto& a = *bs;
        if (p.eta_kind == EtaKind::Real) {
            expect(std::abs(a[0].imag()) < tol && a[0].real() > 0 && a[0].real() <= 0.5 + tol,
                   "beta_1");
            expect(std::abs(a[1].imag()) < tol && a[1].real() >= -tol && a[1].real() <= 0.5 + tol,
                   "beta_2");
            expect(std::abs(a[2].real()) < tol && a[2].imag() >= -tol
                       && a[2].imag() <= 0.5 * im_tau + tol,
                   "beta_3");
        } else {
            expect(std::abs(a[0].real()) < tol && a[0].imag() > 0
                       && a[0].imag() <= 0.5 * im_tau + tol,
                   "beta_1");
            expect(std::abs(a[1].imag()) < tol && a[1].real() >= -tol && a[1].real() <= 0.5 + tol,
                   "beta_2");
            expect(std::abs(a[2].real()) < tol && a[2].imag() >= -tol
                       && a[2].imag() <= 0.5 * im_tau + tol,
                   "beta_3");
        }
    }
    return {q, parity_flip};
}

/// Boundary-string laws.  Returns the fixed pair, the inert strings and the
/// energy-carrying ones for the dispatch; positions are zbar values for real
/// eta and z values for imaginary eta.
inline StringSet select_boundary_strings(const RegimeDispatch& d_in, const ModelParams& p_in)
{
    auto [p, parity_flip] = canonicalize(p_in);
    RegimeDispatch d = d_in;
    if (parity_flip) d.parity = (d.parity == Parity::Even) ? Parity::Odd : Parity::Even;

    const double im_tau = p.tau.value.imag();
    const double t2 = 0.5 * im_tau;  // tau/2i
    StringSet out;

    auto place = [&](cplx w, const double half_band) {
        const int ds = detail::band_sign_difference(w, half_band);
        const bool edge = std::abs(std::abs(w.imag()) - half_band) < 1e-12;
        if (ds != 0 && !edge)
            out.contributing.push_back(w);
        else
            out.inert.push_back(w);
    };

    if (d.eta_kind == EtaKind::Real) {
        const double eta = p.eta.real();
        const double h2 = 0.5 * eta;
        const double b1m = p.beta_minus[0].real(), b1p = p.beta_plus[0].real();
        const double b2m = p.beta_minus[1].real(), b2p = p.beta_plus[1].real();

        const cplx w1(0, 0.5 * (1.0 - eta));
        const cplx w2(t2, 0.5 * (1.0 - eta));
        place(w1, h2);
        place(w2, h2);

        cplx w3, w4, w5, w6;
        if (d.sub == SubRegime::Large) {
            w3 = cplx(0, std::min(h2 + b1m, 0.5));
            w4 = cplx(0, -std::min(h2 + b1p, 0.5));
            if (d.state == StateKind::Ground) {
                w5 = cplx(t2, d.parity == Parity::Even ? std::min(h2 + b2m, 0.5)
                                                       : std::max(h2 - b2m, 0.0));
                w6 = cplx(t2, -std::min(h2 + b2p, 0.5));
            } else if (d.parity == Parity::Even) {
                const double phi1 = std::max(h2 - b2m, eta - 0.5);
                out.helpers["phi1"] = phi1;
                w5 = cplx(t2, phi1);
                w6 = cplx(t2, -std::max({h2 - b2p, 2.0 * eta - 1.0 - phi1, 0.0}));
            } else {
                w5 = cplx(t2, std::min(h2 + b2m, 0.5));
                w6 = cplx(t2, -std::max({h2 - b2p, 1.5 * eta - 1.0 - b2m, 0.0}));
            }
        } else {
            const double phi2 = std::min(h2 + b1m, eta);
            out.helpers["phi2"] = phi2;
            w3 = cplx(0, phi2);
            w4 = cplx(0, -std::min({h2 + b1p, 2.0 * eta - phi2, 0.5}));
            if (d.state == StateKind::Ground) {
                if (d.parity == Parity::Even) {
                    const double phi3 = std::min(h2 + b2m, eta);
                    out.helpers["phi3"] = phi3;
                    w5 = cplx(t2, phi3);
                    w6 = cplx(t2, -std::min({h2 + b2p, 2.0 * eta - phi3, 0.5}));
                } else {
                    w5 = cplx(t2, std::max(h2 - b2m, 0.0));
                    w6 = cplx(t2, -std::min({h2 + b2p, 1.5 * eta + b2m, 0.5}));
                }
            } else {
                if (d.parity == Parity::Even) {
                    w5 = cplx(t2, std::max(h2 - b2m, 0.0));
                    w6 = cplx(t2, -std::max(h2 - b2p, 0.0));
                } else {
                    w5 = cplx(t2, std::min(h2 + b2m, 0.5));
                    w6 = cplx(t2, -std::max(h2 - b2p, 0.0));
                }
            }
            if (d.parity == Parity::Even)
                out.inert.push_back(cplx(0, 0.5));  // even-N line root, energy-free
        }
        place(w3, h2);
        place(w4, h2);
        place(w5, h2);
        place(w6, h2);
        return out;
    }

    // imaginary eta, z-plane
    const cplx eta = p.eta;
    const cplx tau = p.tau.value;
    const double hb = 0.5 * eta.imag();
    const cplx b1m = p.beta_minus[0], b1p = p.beta_plus[0];
    const cplx b3m = p.beta_minus[2], b3p = p.beta_plus[2];
    using detail::max_im;
    using detail::min_im;

    const cplx w1 = 0.5 * (tau - eta);
    const cplx w2 = 0.5 + 0.5 * (tau - eta);
    place(w1, hb);
    place(w2, hb);

    cplx w3, w4, w5, w6;
    if (d.sub == SubRegime::Large) {
        w3 = min_im({0.5 * eta + b1m, 0.5 * tau});
        w4 = -min_im({0.5 * eta + b1p, 0.5 * tau});
        if (d.state == StateKind::Ground) {
            w5 = 0.5 + (d.parity == Parity::Even ? min_im({0.5 * eta + b3m, 0.5 * tau})
                                                 : max_im({0.5 * eta - b3m, cplx(0, 0)}));
            w6 = 0.5 - min_im({0.5 * eta + b3p, 0.5 * tau});
        } else if (d.parity == Parity::Even) {
            const cplx psi1 = max_im({0.5 * eta - b3m, eta - 0.5 * tau});
            out.helpers["psi1"] = psi1;
            w5 = 0.5 + psi1;
            w6 = 0.5 - max_im({0.5 * eta - b3p, 2.0 * eta - tau - psi1, cplx(0, 0)});
        } else {
            w5 = 0.5 + min_im({0.5 * eta + b3m, 0.5 * tau});
            w6 = 0.5 - max_im({0.5 * eta - b3p, 1.5 * eta - tau - b3m, cplx(0, 0)});
        }
    } else {
        const cplx psi2 = min_im({0.5 * eta + b1m, eta});
        out.helpers["psi2"] = psi2;
        w3 = psi2;
        w4 = -min_im({0.5 * eta + b1p, 2.0 * eta - psi2, 0.5 * tau});
        if (d.state == StateKind::Ground) {
            if (d.parity == Parity::Even) {
                const cplx psi3 = min_im({0.5 * eta + b3m, eta});
                out.helpers["psi3"] = psi3;
                w5 = 0.5 + psi3;
                w6 = 0.5 - min_im({0.5 * eta + b3p, 2.0 * eta - psi3, 0.5 * tau});
            } else {
                w5 = 0.5 + max_im({0.5 * eta - b3m, cplx(0, 0)});
                w6 = 0.5 - min_im({0.5 * eta + b3p, 1.5 * eta + b3m, 0.5 * tau});
            }
        } else {
            if (d.parity == Parity::Even) {
                w5 = 0.5 + max_im({0.5 * eta - b3m, cplx(0, 0)});
                w6 = 0.5 - max_im({0.5 * eta - b3p, cplx(0, 0)});
            } else {
                w5 = 0.5 + min_im({0.5 * eta + b3m, 0.5 * tau});
                w6 = 0.5 - max_im({0.5 * eta - b3p, cplx(0, 0)});
            }
        }
        if (d.parity == Parity::Even)
            out.inert.push_back(cplx(0, t2));  // even-N line root, energy-free
    }
    place(w3, hb);
    place(w4, hb);
    place(w5, hb);
    place(w6, hb);
    return out;
}

// ---------------------------------------------------------------------------
// Bulk root density
// ---------------------------------------------------------------------------

/// Fourier mode rho~(k) of the bulk root density for the dispatch's regime.
/// The k = 0 mode is fixed by the root-count normalization (the closed-form
/// ratio is 0/0 there); pair regimes count pair centers.
inline cplx bulk_density_fourier(const RegimeDispatch& d, const ModelParams& p,
                                 const StringSet& strings, int k)
{
    const cplx tau = p.tau.value;
    const cplx eta = p.eta;
    const double im_tau = tau.imag();
    const double n = p.n_sites;
    const std::vector<cplx> ws = strings.all();

    if (k == 0) {
        const double n_discrete = static_cast<double>(ws.size());
        const double n_bulk = n + 3.0 - n_discrete;
        const bool pair_regime = (d.sub == SubRegime::Small);
        return cplx((pair_regime ? 0.5 * n_bulk : n_bulk) / n, 0.0);
    }

    // Collect the signed kernel shifts, then annihilate exactly coinciding
    // +/- pairs symbolically (the alpha terms against uncapped strings);
    // left in place they cancel only analytically and swamp the k-series
    // with catastrophic roundoff.
    const bool real_kind = (d.eta_kind == EtaKind::Real);
    const cplx i(0, 1);
    std::vector<std::pair<double, cplx>> terms;
    auto reduce = [&](cplx g) {
        return real_kind ? detail::reduce_shift_ab(g) : detail::reduce_shift_cd(g, im_tau);
    };
    auto push = [&](double c, cplx g) { terms.emplace_back(c, reduce(g)); };

    if (real_kind) {
        push(2.0 * n + 1.0, eta * i);
        for (const auto& alpha : {p.alpha_minus(), p.alpha_plus()})
            for (const cplx& a : alpha) push(1.0, a * i);
        push(1.0, eta * i + 0.5 * i);
        push(1.0, eta * i + 0.5 * tau * i);
        push(1.0, eta * i + 0.5 * (tau - 1.0) * i);
        push(-1.0, 0.5 * eta * i);
        push(-1.0, 0.5 * (eta + 1.0) * i);
        push(-1.0, 0.5 * (eta + tau) * i);
        push(-1.0, 0.5 * (eta + 1.0 + tau) * i);
        for (const cplx& w : ws) {
            push(-1.0, w - 0.5 * eta * i);
            push(-1.0, w + 0.5 * eta * i);
        }
    } else {
        push(2.0 * n + 1.0, eta);
        for (const auto& alpha : {p.alpha_minus(), p.alpha_plus()})
            for (const cplx& a : alpha) push(1.0, a);
        push(1.0, eta + 0.5);
        push(1.0, eta + 0.5 * tau);
        push(1.0, eta + 0.5 * (1.0 - tau));
        push(-1.0, 0.5 * eta);
        push(-1.0, 0.5 * (eta + 1.0));
        push(-1.0, 0.5 * (eta + tau));
        push(-1.0, 0.5 * (eta + 1.0 + tau));
        for (const cplx& w : ws) {
            push(-1.0, w + 0.5 * eta);
            push(-1.0, w - 0.5 * eta);
        }
    }

    // Shifts carry identical kernel values when they agree modulo the kernel
    // symmetries: evenness, the strip period (gamma + i resp. xi + 1), and
    // for the A-kernel also complex conjugation (A is imaginary-valued on
    // the real line).
    auto same_shift = [&](cplx a, cplx b) {
        const cplx images[4] = {b, -b, std::conj(b), -std::conj(b)};
        const int n_img = real_kind ? 4 : 2;
        for (int m = 0; m < n_img; ++m) {
            const cplx diff = a - images[m];
            const double fixed_axis = real_kind ? std::abs(diff.real()) : std::abs(diff.imag());
            const double periodic_axis = real_kind ? std::remainder(diff.imag(), 1.0)
                                                   : std::remainder(diff.real(), 1.0);
            if (fixed_axis < 1e-13 && std::abs(periodic_axis) < 1e-13) return true;
        }
        return false;
    };
    for (size_t a = 0; a < terms.size(); ++a) {
        if (terms[a].first >= 0) continue;
        for (size_t b = 0; b < terms.size(); ++b) {
            if (terms[b].first <= 0 || terms[b].first > 1.5) continue;
            if (same_shift(terms[a].second, terms[b].second)) {
                terms[a].first += 1.0;
                terms[b].first -= 1.0;
                break;
            }
        }
    }

    const KernelKind kk = real_kind ? KernelKind::A : KernelKind::C;
    cplx num(0, 0);
    for (const auto& [c, g] : terms)
        if (c != 0.0) num += c * kernel_fourier(kk, g, k, tau);

    cplx den;
    if (real_kind)
        den = (d.sub == SubRegime::Large)
                  ? kernel_fourier(kk, reduce(0.5 * (1.0 - eta) * i), k, tau)
                  : kernel_fourier(kk, reduce(0.5 * eta * i), k, tau)
                        + kernel_fourier(kk, reduce(1.5 * eta * i), k, tau);
    else
        den = (d.sub == SubRegime::Large)
                  ? kernel_fourier(kk, reduce(0.5 * (tau - eta)), k, tau)
                  : kernel_fourier(kk, reduce(1.5 * eta), k, tau)
                        + kernel_fourier(kk, reduce(0.5 * eta), k, tau);
    return num / den / n;
}

/// Precomputed Fourier modes of the smooth part of the density.  The closed
/// forms carry an exact residual comb (constant large-k tail) localized at
/// the fixed-pair positions on the line ends; the tail is measured at large
/// k and removed, which leaves the smooth bulk profile.
struct DensityModes {
    double period;
    cplx mode0;
    std::vector<cplx> plus, minus;  // k = 1..K and -1..-K
    cplx tail_even, tail_odd;
};

inline DensityModes density_modes(const RegimeDispatch& d, const ModelParams& p,
                                  const StringSet& strings, int k_max = 120)
{
    DensityModes dm;
    dm.period = (d.eta_kind == EtaKind::Real) ? p.tau.value.imag() : 1.0;
    dm.mode0 = bulk_density_fourier(d, p, strings, 0);
    dm.plus.reserve(static_cast<size_t>(k_max));
    dm.minus.reserve(static_cast<size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        dm.plus.push_back(bulk_density_fourier(d, p, strings, k));
        dm.minus.push_back(bulk_density_fourier(d, p, strings, -k));
    }
    const int ke = k_max + (k_max % 2 == 0 ? 20 : 21);  // far even / odd probes
    dm.tail_even = bulk_density_fourier(d, p, strings, ke);
    dm.tail_odd = bulk_density_fourier(d, p, strings, ke + 1);
    if (k_max % 2 != 0) std::swap(dm.tail_even, dm.tail_odd);
    return dm;
}

/// Smooth bulk density at x from the tail-subtracted inverse transform.
inline double bulk_density(const DensityModes& dm, double x)
{
    cplx sum = dm.mode0;
    for (size_t i = 0; i < dm.plus.size(); ++i) {
        const int k = static_cast<int>(i) + 1;
        const cplx tail = (k % 2 == 0) ? dm.tail_even : dm.tail_odd;
        const double phase = 2.0 * kPi * k * x / dm.period;
        sum += (dm.plus[i] - tail) * std::exp(cplx(0, phase))
             + (dm.minus[i] - std::conj(tail)) * std::exp(cplx(0, -phase));
    }
    return (sum / dm.period).real();
}

// ---------------------------------------------------------------------------
// Surface and excitation energies
// ---------------------------------------------------------------------------

/// One evaluated point: bulk density, boundary components, per-root string
/// energies and the assembled surface (and optionally excitation) energy.
struct EnergyBreakdown {
    double e_bulk = 0;
    double e_free = 0;
    double e_left = 0;   // minus-edge field
    double e_right = 0;  // plus-edge field
    std::vector<std::pair<cplx, double>> e_strings;
    double total_density_part = 0;
    double surface = 0;
    double excitation = 0;
};

/// The parity-correction root of the periodic-chain reference: tau/2i in the
/// zbar-plane (real eta) or 1/2 in the z-plane (imaginary eta).
inline cplx parity_correction_root(const RegimeDispatch& d, const ModelParams& p)
{
    return d.eta_kind == EtaKind::Real ? cplx(0.5 * p.tau.value.imag(), 0) : cplx(0.5, 0);
}

inline double excitation_energy(const RegimeDispatch& d, const ModelParams& p, double eps = 1e-12);

/// Assembles the surface energy for the dispatch's parity at the ground
/// state: free + field terms + contributing ground strings - the odd-N
/// periodic correction.
inline EnergyBreakdown surface_energy(const RegimeDispatch& d_in, const ModelParams& p_in,
                                      double eps = 1e-12)
{
    // The printed closed forms are written for the canonical region; map the
    // parameters there first (the only non-invariant move flips the parity).
    auto [p, parity_flip] = canonicalize(p_in);
    RegimeDispatch d = d_in;
    if (parity_flip) d.parity = (d.parity == Parity::Even) ? Parity::Odd : Parity::Even;
    d.state = StateKind::Ground;

    EnergyBreakdown out;
    out.e_bulk = bulk_energy_density(d, p, eps);
    out.e_free = free_boundary_energy(d, p, eps);
    out.e_left = field_boundary_energy(d, p, Side::Minus, eps);
    out.e_right = field_boundary_energy(d, p, Side::Plus, eps);
    out.total_density_part = p.n_sites * out.e_bulk;

    const StringSet strings = select_boundary_strings(d, p);
    double string_sum = 0;
    for (const cplx& w : strings.contributing) {
        const double e = discrete_root_energy(d, p, w, eps);
        out.e_strings.emplace_back(w, e);
        string_sum += e;
    }
    for (const cplx& w : strings.inert) out.e_strings.emplace_back(w, 0.0);

    double parity_term = 0;
    if (d.parity == Parity::Odd)
        parity_term = discrete_root_energy(d, p, parity_correction_root(d, p), eps);

    out.surface = out.e_free + out.e_left + out.e_right + string_sum - parity_term;
    out.excitation = excitation_energy(d, p, eps);
    return out;
}

/// Excitation energy: contributing strings of the first excited state minus
/// those of the ground state (the shared fixed pair cancels exactly).
inline double excitation_energy(const RegimeDispatch& d_in, const ModelParams& p_in, double eps)
{
    auto [p, parity_flip] = canonicalize(p_in);
    RegimeDispatch dg = d_in, de = d_in;
    if (parity_flip) {
        dg.parity = (dg.parity == Parity::Even) ? Parity::Odd : Parity::Even;
        de.parity = dg.parity;
    }
    dg.state = StateKind::Ground;
    de.state = StateKind::FirstExcited;

    const StringSet sg = select_boundary_strings(dg, p);
    const StringSet se = select_boundary_strings(de, p);
    double val = 0;
    for (const cplx& w : se.contributing) val += discrete_root_energy(de, p, w, eps);
    for (const cplx& w : sg.contributing) val -= discrete_root_energy(dg, p, w, eps);
    return val;
}

}  // namespace xyzopen::thermo
