#pragma once

#include <Eigen/Dense>

#include <array>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "xyzopen/elliptic.hpp"

// Physical objects of the open chain: anisotropic couplings and boundary
// fields, the eight-vertex R-matrix, the non-diagonal reflection matrices,
// monodromy/transfer matrices and the Hamiltonian, plus numeric certificates
// of integrability and Hermiticity.
namespace xyzopen::lattice {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

enum class EtaKind { Real, PureImaginary };

/// All physical parameters of one model instance.  Sites are numbered
/// 1..N and map little-endian onto qubits (site 1 = least significant bit).
struct ModelParams {
    elliptic::LatticeTau tau;
    cplx eta;
    EtaKind eta_kind;
    int n_sites;
    std::array<cplx, 3> beta_minus{};
    std::array<cplx, 3> beta_plus{};
    std::vector<cplx> inhomogeneities;  // empty means homogeneous

    ModelParams(elliptic::LatticeTau tau_, cplx eta_, EtaKind kind, int n,
                std::array<cplx, 3> bm, std::array<cplx, 3> bp,
                std::vector<cplx> thetas = {})
        : tau(tau_), eta(eta_), eta_kind(kind), n_sites(n),
          beta_minus(bm), beta_plus(bp), inhomogeneities(std::move(thetas))
    {
        if (n_sites < 1) throw std::domain_error("ModelParams: need at least one site");
        const double it = tau.value.imag();
        if (eta_kind == EtaKind::Real) {
            if (std::abs(eta.imag()) > 1e-12)
                throw std::domain_error("ModelParams: real eta has nonzero imaginary part");
            if (!(eta.real() > 1e-12 && eta.real() < 1.0 - 1e-12))
                throw std::domain_error("ModelParams: real eta must lie strictly in (0,1)");
        } else {
            if (std::abs(eta.real()) > 1e-12)
                throw std::domain_error("ModelParams: imaginary eta has nonzero real part");
            if (!(eta.imag() > 1e-12 && eta.imag() < it - 1e-12))
                throw std::domain_error("ModelParams: Im(eta) must lie strictly in (0, Im(tau))");
        }
        if (!inhomogeneities.empty() && static_cast<int>(inhomogeneities.size()) != n_sites)
            throw std::domain_error("ModelParams: inhomogeneity count must match n_sites");
    }

    cplx theta_j(int j) const  // 1-based site index
    {
        return inhomogeneities.empty() ? cplx(0, 0) : inhomogeneities[static_cast<size_t>(j - 1)];
    }

    bool homogeneous() const
    {
        for (const cplx& t : inhomogeneities)
            if (std::abs(t) > 0) return false;
        return true;
    }

    // alpha_1 = beta_1, alpha_2 = beta_2 + tau/2, alpha_3 = beta_3 + 1/2
    std::array<cplx, 3> alpha_minus() const
    {
        return {beta_minus[0], beta_minus[1] + 0.5 * tau.value, beta_minus[2] + 0.5};
    }
    std::array<cplx, 3> alpha_plus() const
    {
        return {beta_plus[0], beta_plus[1] + 0.5 * tau.value, beta_plus[2] + 0.5};
    }

    Eigen::Index dim() const { return Eigen::Index(1) << n_sites; }
};

/// Bulk couplings, boundary fields and the K-matrix constants they share.
struct CouplingSet {
    cplx jx, jy, jz;
    cplx hx_minus, hy_minus, hz_minus;
    cplx hx_plus, hy_plus, hz_plus;
    std::array<cplx, 3> c_minus{};  // (c_x, c_y, c_z)
    std::array<cplx, 3> c_plus{};

    double max_imag() const
    {
        double m = 0;
        for (cplx v : {jx, jy, jz, hx_minus, hy_minus, hz_minus, hx_plus, hy_plus, hz_plus})
            m = std::max(m, std::abs(v.imag()));
        return m;
    }
};

namespace detail {

inline const M2& pauli(int i)  // 0:x 1:y 2:z
{
    static const M2 sx = (M2() << 0, 1, 1, 0).finished();
    static const M2 sy = (M2() << 0, cplx(0, -1), cplx(0, 1), 0).finished();
    static const M2 sz = (M2() << 1, 0, 0, -1).finished();
    static const M2* all[3] = {&sx, &sy, &sz};
    return *all[i];
}

inline Matrix kron(const Matrix& a, const Matrix& b)
{
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline const M4& permutation()
{
    static const M4 p = (M4() << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1).finished();
    return p;
}

// sigma(2u) / sigma(u + shift), with the removable 0/0 points (both
// arguments on the sigma zero lattice) evaluated by the derivative ratio.
inline cplx sigma_ratio_2u(cplx u, cplx shift, const elliptic::LatticeTau& tau)
{
    const cplx den = elliptic::sigma(u + shift, tau);
    const double scale = std::abs(elliptic::sigma_prime(cplx(0, 0), tau));
    if (std::abs(den) < 1e-8 * scale) {
        if (std::abs(elliptic::sigma(2.0 * u, tau)) < 1e-8 * scale)
            return 2.0 * elliptic::sigma_prime(2.0 * u, tau)
                 / elliptic::sigma_prime(u + shift, tau);
        throw std::domain_error("k-matrix: spectral parameter at a pole");
    }
    return elliptic::sigma(2.0 * u, tau) / den;
}

}  // namespace detail

inline std::array<cplx, 3> k_matrix_constants(const std::array<cplx, 3>& alpha,
                                              const elliptic::LatticeTau& tau)
{
    auto sg = [&](cplx z) { return elliptic::sigma(z, tau); };
    const cplx t = tau.value;
    const cplx sum = alpha[0] + alpha[1] + alpha[2];

    for (const cplx& a : alpha)
        if (elliptic::detail::lattice_distance(a, t) < 1e-10)
            throw std::domain_error("boundary parameter sits on a sigma zero (field undefined)");

    auto prod_shift = [&](cplx shift) {
        cplx p(1, 0);
        for (const cplx& a : alpha) p *= sg(a - shift) / sg(a);
        return p;
    };
    const cplx i_pi(0, kPi);
    return {std::exp(-i_pi * (sum - 0.5 * t)) * prod_shift(0.5 * t),
            std::exp(-i_pi * (sum - 0.5 * (1.0 + t))) * prod_shift(0.5 * (1.0 + t)),
            prod_shift(0.5)};
}

/// Couplings J_x,J_y,J_z and the six boundary field components.
inline CouplingSet couplings(const ModelParams& p)
{
    const cplx t = p.tau.value;
    const cplx i_pi(0, kPi);
    auto sg = [&](cplx z) { return elliptic::sigma(z, p.tau); };

    CouplingSet cs;
    cs.jx = std::exp(i_pi * p.eta) * sg(p.eta + 0.5 * t) / sg(0.5 * t);
    cs.jy = std::exp(i_pi * p.eta) * sg(p.eta + 0.5 * (1.0 + t)) / sg(0.5 * (1.0 + t));
    cs.jz = sg(p.eta + 0.5) / sg(0.5);

    cs.c_minus = k_matrix_constants(p.alpha_minus(), p.tau);
    cs.c_plus = k_matrix_constants(p.alpha_plus(), p.tau);

    const cplx se = sg(p.eta);
    cs.hx_minus = +se / sg(0.5 * t) * cs.c_minus[0];
    cs.hy_minus = +se / sg(0.5 * (1.0 + t)) * cs.c_minus[1];
    cs.hz_minus = +se / sg(0.5) * cs.c_minus[2];
    cs.hx_plus = -se / sg(0.5 * t) * cs.c_plus[0];
    cs.hy_plus = -se / sg(0.5 * (1.0 + t)) * cs.c_plus[1];
    cs.hz_plus = -se / sg(0.5) * cs.c_plus[2];
    return cs;
}

/// Eight-vertex R-matrix; rows and columns ordered (00,01,10,11).
inline M4 r_matrix(cplx u, const ModelParams& p)
{
    const elliptic::LatticeTau tau2 = p.tau.doubled();
    auto th0 = [&](cplx z) { return elliptic::theta(elliptic::ThetaChar::zero_half(), z, tau2); };
    auto th1 = [&](cplx z) { return elliptic::theta(elliptic::ThetaChar::half_half(), z, tau2); };

    const cplx den_ab = th0(cplx(0, 0)) * th1(p.eta);
    const cplx den_cd = th0(cplx(0, 0)) * th0(p.eta);
    const cplx a = th0(u) * th1(u + p.eta) / den_ab;
    const cplx b = th1(u) * th0(u + p.eta) / den_ab;
    const cplx c = th0(u) * th0(u + p.eta) / den_cd;
    const cplx d = th1(u) * th1(u + p.eta) / den_cd;

    M4 r = M4::Zero();
    r(0, 0) = a; r(0, 3) = d;
    r(1, 1) = b; r(1, 2) = c;
    r(2, 1) = c; r(2, 2) = b;
    r(3, 0) = d; r(3, 3) = a;
    return r;
}

namespace detail {

inline M2 k_from_constants(cplx u, const std::array<cplx, 3>& c, const ModelParams& p)
{
    const cplx t = p.tau.value;
    const cplx i_pi(0, kPi);
    // Coefficients written with sigma(2u) multiplied through, so each one has
    // only genuine poles; removable 0/0 points go through sigma_ratio_2u.
    const cplx k0 = 0.5 * sigma_ratio_2u(u, cplx(0, 0), p.tau);
    const cplx kx = 0.5 * sigma_ratio_2u(u, 0.5 * t, p.tau) * c[0] * std::exp(-i_pi * u);
    const cplx ky = 0.5 * sigma_ratio_2u(u, 0.5 * (1.0 + t), p.tau) * c[1] * std::exp(-i_pi * u);
    const cplx kz = 0.5 * sigma_ratio_2u(u, cplx(0.5, 0), p.tau) * c[2];
    return k0 * M2::Identity() + kx * pauli(0) + ky * pauli(1) + kz * pauli(2);
}

}  // namespace detail

inline M2 k_minus(cplx u, const ModelParams& p)
{
    return detail::k_from_constants(u, k_matrix_constants(p.alpha_minus(), p.tau), p);
}

inline M2 k_plus(cplx u, const ModelParams& p)
{
    return detail::k_from_constants(-u - p.eta, k_matrix_constants(p.alpha_plus(), p.tau), p);
}

namespace detail {

// Apply a two-site gate g (row index s_hi*2 + s_lo) to the amplitude vector.
inline void apply_two_site(Vector& v, const M4& g, int bit_hi, int bit_lo)
{
    const Eigen::Index n = v.size();
    const Eigen::Index mhi = Eigen::Index(1) << bit_hi;
    const Eigen::Index mlo = Eigen::Index(1) << bit_lo;
    for (Eigen::Index base = 0; base < n; ++base) {
        if ((base & mhi) || (base & mlo)) continue;
        const Eigen::Index i01 = base | mlo, i10 = base | mhi, i11 = base | mhi | mlo;
        const cplx a0 = v[base], a1 = v[i01], a2 = v[i10], a3 = v[i11];
        v[base] = g(0, 0) * a0 + g(0, 1) * a1 + g(0, 2) * a2 + g(0, 3) * a3;
        v[i01] = g(1, 0) * a0 + g(1, 1) * a1 + g(1, 2) * a2 + g(1, 3) * a3;
        v[i10] = g(2, 0) * a0 + g(2, 1) * a1 + g(2, 2) * a2 + g(2, 3) * a3;
        v[i11] = g(3, 0) * a0 + g(3, 1) * a1 + g(3, 2) * a2 + g(3, 3) * a3;
    }
}

struct RCache {
    std::vector<M4> forward;   // R(u - theta_j), j = 1..N
    std::vector<M4> backward;  // R(u + theta_j)

    RCache(cplx u, const ModelParams& p)
    {
        const int n = p.n_sites;
        forward.reserve(n);
        backward.reserve(n);
        if (p.homogeneous()) {
            const M4 r = r_matrix(u, p);
            forward.assign(static_cast<size_t>(n), r);
            backward.assign(static_cast<size_t>(n), r);
        } else {
            for (int j = 1; j <= n; ++j) {
                forward.push_back(r_matrix(u - p.theta_j(j), p));
                backward.push_back(r_matrix(u + p.theta_j(j), p));
            }
        }
    }
};

}  // namespace detail

/// t(u) psi without materializing the 2^(N+1)-dimensional operators: the
/// auxiliary space rides along as one extra qubit and the monodromies are
/// applied as sequences of two-site gates (cost O(N 4^N) for a full matrix,
/// O(N 2^N) per vector).
inline Vector apply_transfer(cplx u, const ModelParams& p, const Vector& psi)
{
    const int n = p.n_sites;
    const Eigen::Index dim = p.dim();
    if (psi.size() != dim) throw std::invalid_argument("apply_transfer: dimension mismatch");

    const detail::RCache rc(u, p);
    const M2 km = k_minus(u, p);
    const M2 kp = k_plus(u, p);

    // blocks[d][a] = (That(u))_{d a} psi
    std::array<std::array<Vector, 2>, 2> hat_blocks;
    for (int a = 0; a < 2; ++a) {
        Vector big = Vector::Zero(2 * dim);
        big.segment(a * dim, dim) = psi;
        for (int j = n; j >= 1; --j)
            detail::apply_two_site(big, rc.backward[static_cast<size_t>(j - 1)], n, j - 1);
        hat_blocks[0][a] = big.segment(0, dim);
        hat_blocks[1][a] = big.segment(dim, dim);
    }

    Vector result = Vector::Zero(dim);
    for (int a = 0; a < 2; ++a) {
        Vector big = Vector::Zero(2 * dim);
        for (int c = 0; c < 2; ++c)
            big.segment(c * dim, dim) = km(c, 0) * hat_blocks[0][a] + km(c, 1) * hat_blocks[1][a];
        for (int j = 1; j <= n; ++j)
            detail::apply_two_site(big, rc.forward[static_cast<size_t>(j - 1)], n, j - 1);
        for (int b = 0; b < 2; ++b)
            result += kp(a, b) * big.segment(b * dim, dim);
    }
    return result;
}

inline Matrix transfer_matrix(cplx u, const ModelParams& p)
{
    if (p.n_sites > 16) throw std::domain_error("transfer_matrix: N above implementation cap");
    const Eigen::Index dim = p.dim();
    Matrix t(dim, dim);
    Vector e = Vector::Zero(dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        e[col] = 1.0;
        t.col(col) = apply_transfer(u, p, e);
        e[col] = 0.0;
    }
    return t;
}

/// Direct construction of the Hamiltonian from the given couplings.
inline Matrix hamiltonian(const ModelParams& p, const CouplingSet& cs)
{
    if (p.n_sites < 2) throw std::domain_error("hamiltonian: need at least two sites");
    const Eigen::Index dim = p.dim();
    Matrix h = Matrix::Zero(dim, dim);

    for (Eigen::Index s = 0; s < dim; ++s) {
        for (int j = 0; j + 1 < p.n_sites; ++j) {
            const int b1 = (s >> j) & 1, b2 = (s >> (j + 1)) & 1;
            const Eigen::Index f = s ^ (Eigen::Index(1) << j) ^ (Eigen::Index(1) << (j + 1));
            h(f, s) += cs.jx + (b1 == b2 ? -cs.jy : cs.jy);
            h(s, s) += (b1 == b2 ? cs.jz : -cs.jz);
        }
        {   // left boundary, site 1
            const int b = static_cast<int>(s & 1);
            const Eigen::Index f = s ^ 1;
            h(f, s) += cs.hx_minus + (b ? cplx(0, -1) : cplx(0, 1)) * cs.hy_minus;
            h(s, s) += (b ? -1.0 : 1.0) * cs.hz_minus;
        }
        {   // right boundary, site N
            const Eigen::Index m = Eigen::Index(1) << (p.n_sites - 1);
            const int b = (s & m) ? 1 : 0;
            const Eigen::Index f = s ^ m;
            h(f, s) += cs.hx_plus + (b ? cplx(0, -1) : cplx(0, 1)) * cs.hy_plus;
            h(s, s) += (b ? -1.0 : 1.0) * cs.hz_plus;
        }
    }
    return h;
}

inline Matrix hamiltonian(const ModelParams& p)
{
    return hamiltonian(p, couplings(p));
}

/// Hamiltonian through the transfer matrix: sigma(eta)/sigma'(0) *
/// [t(0)^{-1} t'(0) - ((N-1) zeta(eta) + 2 zeta(2 eta))].  t'(0) uses a
/// four-point cross stencil (+-h, +-ih) at h = 1e-5 with one Richardson step.
inline Matrix hamiltonian_from_transfer(const ModelParams& p)
{
    if (!p.homogeneous())
        throw std::domain_error("hamiltonian_from_transfer: requires the homogeneous point");

    auto stencil = [&](double h) {
        const cplx ih(0, h);
        Matrix d = (transfer_matrix(cplx(h, 0), p) - transfer_matrix(cplx(-h, 0), p)) / (4 * h);
        d += (transfer_matrix(ih, p) - transfer_matrix(-ih, p)) / (4.0 * ih);
        return d;
    };
    const double h = 1e-5;
    const Matrix tp = (16.0 * stencil(h) - stencil(2 * h)) / 15.0;
    const Matrix t0 = transfer_matrix(cplx(0, 0), p);

    const Matrix logderiv = t0.partialPivLu().solve(tp);
    const cplx shift = double(p.n_sites - 1) * elliptic::zeta(p.eta, p.tau)
                     + 2.0 * elliptic::zeta(2.0 * p.eta, p.tau);
    const cplx pref = elliptic::sigma(p.eta, p.tau) / elliptic::sigma_prime(cplx(0, 0), p.tau);
    return pref * (logderiv - shift * Matrix::Identity(t0.rows(), t0.cols()));
}

// ---------------------------------------------------------------------------
// Hermiticity regions and parameter transformations
// ---------------------------------------------------------------------------

struct RegionCheck {
    bool in_region = true;
    std::vector<std::string> violated;
};

namespace detail {

inline double mod_into(double x, double period)
{
    double r = std::fmod(x, period);
    if (r < 0) r += period;
    return r;
}

inline bool near_any(double x, std::initializer_list<double> targets, double period, double tol)
{
    for (double t : targets) {
        double d = std::abs(mod_into(x - t, period));
        d = std::min(d, period - d);
        if (d < tol) return true;
    }
    return false;
}

}  // namespace detail

/// Checks the per-component Hermitian-region clauses for the given eta kind
/// and reports every violated one.
inline RegionCheck hermitian_region_check(const ModelParams& p)
{
    const double it = p.tau.value.imag();
    const double tol = 1e-9;
    RegionCheck out;

    auto check_side = [&](const std::array<cplx, 3>& b, const char* side) {
        const cplx b1 = b[0], b2 = b[1], b3 = b[2];
        if (p.eta_kind == EtaKind::Real) {
            if (detail::near_any(b1.real(), {0.0}, 2.0, tol))
                out.violated.push_back(std::string("Re(beta") + side + "_1) in (0,2)");
            if (!detail::near_any(b1.imag(), {0.0, it}, 2 * it, tol))
                out.violated.push_back(std::string("Im(beta") + side + "_1)=0 or tau/i");
            if (!detail::near_any(b2.imag(), {0.0, it}, 2 * it, tol))
                out.violated.push_back(std::string("Im(beta") + side + "_2)=0 or tau/i");
            if (!detail::near_any(b3.real(), {0.0, 1.0}, 2.0, tol))
                out.violated.push_back(std::string("Re(beta") + side + "_3)=0 or 1");
        } else {
            if (!detail::near_any(b1.real(), {0.0, 1.0}, 2.0, tol))
                out.violated.push_back(std::string("Re(beta") + side + "_1)=0 or 1");
            if (detail::near_any(b1.imag(), {0.0}, 2 * it, tol))
                out.violated.push_back(std::string("Im(beta") + side + "_1) in (0,2 tau/i)");
            if (!detail::near_any(b2.imag(), {0.0, it}, 2 * it, tol))
                out.violated.push_back(std::string("Im(beta") + side + "_2)=0 or tau/i");
            if (!detail::near_any(b3.real(), {0.0, 1.0}, 2.0, tol))
                out.violated.push_back(std::string("Re(beta") + side + "_3)=0 or 1");
        }
    };
    check_side(p.beta_minus, "-");
    check_side(p.beta_plus, "+");
    out.in_region = out.violated.empty();
    return out;
}

enum class ParameterTransform { SwapPM, NegateBoth, B1ReflectHalf, B1PlusOne, B1PlusTau };

enum class TransformEffectKind { SpectrumInvariant, FieldFlip, ParitySwapEquivalent };

struct TransformEffect {
    TransformEffectKind kind;
    bool flips_x = false, flips_y = false, flips_z = false;
};

/// The boundary-parameter moves of the model and their declared physical
/// effect: field component flips, full spectrum invariance, or equivalence
/// to swapping the parity of N.
inline std::pair<ModelParams, TransformEffect>
apply_parameter_transform(const ModelParams& p, ParameterTransform kind)
{
    ModelParams q = p;
    const cplx t = p.tau.value;
    const bool real_eta = (p.eta_kind == EtaKind::Real);
    TransformEffect eff{TransformEffectKind::SpectrumInvariant};

    switch (kind) {
        case ParameterTransform::SwapPM:
            std::swap(q.beta_minus, q.beta_plus);
            break;
        case ParameterTransform::NegateBoth:
            for (auto& b : q.beta_minus) b = -b;
            for (auto& b : q.beta_plus) b = -b;
            break;
        case ParameterTransform::B1ReflectHalf:
            if (real_eta) {
                q.beta_plus[0] = 1.0 - q.beta_plus[0];
                eff = {TransformEffectKind::FieldFlip, false, false, true};
            } else {
                q.beta_plus[0] = t - q.beta_plus[0];
                eff = {TransformEffectKind::FieldFlip, true, false, false};
            }
            break;
        case ParameterTransform::B1PlusOne:
            q.beta_plus[0] += 1.0;
            eff = real_eta ? TransformEffect{TransformEffectKind::ParitySwapEquivalent, true, true, false}
                           : TransformEffect{TransformEffectKind::FieldFlip, true, true, false};
            break;
        case ParameterTransform::B1PlusTau:
            q.beta_plus[0] += t;
            eff = real_eta ? TransformEffect{TransformEffectKind::FieldFlip, false, true, true}
                           : TransformEffect{TransformEffectKind::ParitySwapEquivalent, false, true, true};
            break;
    }
    return {q, eff};
}

// ---------------------------------------------------------------------------
// Integrability certificates
// ---------------------------------------------------------------------------

struct IntegrabilityReport {
    double qybe = 0, reflection = 0, dual_reflection = 0;
    double unitarity = 0, crossing = 0, pt_symmetry = 0, z2_symmetry = 0;
    double initial_condition = 0, antisymmetry = 0;
    double commutator = 0;

    double max_residual() const
    {
        return std::max({qybe, reflection, dual_reflection, unitarity, crossing,
                         pt_symmetry, z2_symmetry, initial_condition, antisymmetry, commutator});
    }
};

namespace detail {

inline double rel_max_norm(const Matrix& diff, const Matrix& scale)
{
    const double s = std::max(1.0, scale.cwiseAbs().maxCoeff());
    return diff.cwiseAbs().maxCoeff() / s;
}

inline M4 partial_transpose_2(const M4& a)
{
    M4 b;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l)
                    b(2 * i + j, 2 * k + l) = a(2 * i + l, 2 * k + j);
    return b;
}

}  // namespace detail

/// Residuals of all the defining relations, maximized over n_points random
/// spectral points.  `literal_dual_shift` reproduces the misprinted dual
/// reflection shift (-u1-u2-2 instead of -u1-u2-2 eta) for diagnostics.
inline IntegrabilityReport integrability_report(const ModelParams& p, int n_points = 20,
                                                unsigned seed = 42,
                                                bool literal_dual_shift = false)
{
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> box(-0.37, 0.37);
    auto rand_u = [&]() { return cplx(box(rng), 0.5 * box(rng)); };

    IntegrabilityReport rep;
    const Matrix eye2 = Matrix::Identity(2, 2);
    const M4 perm = detail::permutation();
    const Matrix p23 = detail::kron(eye2, perm);

    auto r12 = [&](cplx u) -> Matrix { return r_matrix(u, p); };
    auto r21 = [&](cplx u) -> Matrix { return perm * r_matrix(u, p) * perm; };

    for (int it = 0; it < n_points; ++it) {
        const cplx u1 = rand_u(), u2 = rand_u(), u3 = rand_u();

        {   // quantum Yang-Baxter equation on C^8
            const Matrix a12 = detail::kron(r12(u1 - u2), eye2);
            const Matrix a23 = detail::kron(eye2, r12(u2 - u3));
            const Matrix a13 = p23 * detail::kron(r12(u1 - u3), eye2) * p23;
            const Matrix lhs = a12 * a13 * a23, rhs = a23 * a13 * a12;
            rep.qybe = std::max(rep.qybe, detail::rel_max_norm(lhs - rhs, lhs));
        }
        {   // reflection equation
            const Matrix k1 = detail::kron(k_minus(u1, p), eye2);
            const Matrix k2 = detail::kron(eye2, k_minus(u2, p));
            const Matrix lhs = r12(u1 - u2) * k1 * r21(u1 + u2) * k2;
            const Matrix rhs = k2 * r12(u1 + u2) * k1 * r21(u1 - u2);
            rep.reflection = std::max(rep.reflection, detail::rel_max_norm(lhs - rhs, lhs));
        }
        {   // dual reflection equation
            const cplx shift = literal_dual_shift ? -u1 - u2 - 2.0 : -u1 - u2 - 2.0 * p.eta;
            const Matrix k1 = detail::kron(k_plus(u1, p), eye2);
            const Matrix k2 = detail::kron(eye2, k_plus(u2, p));
            const Matrix lhs = r12(u2 - u1) * k1 * r21(shift) * k2;
            const Matrix rhs = k2 * r12(shift) * k1 * r21(u2 - u1);
            rep.dual_reflection = std::max(rep.dual_reflection, detail::rel_max_norm(lhs - rhs, lhs));
        }
        {   // unitarity: R12(u) R21(-u) = -xi(u) id
            const cplx xi = elliptic::sigma(u1 - p.eta, p.tau) * elliptic::sigma(u1 + p.eta, p.tau)
                          / std::pow(elliptic::sigma(p.eta, p.tau), 2);
            const Matrix lhs = r12(u1) * r21(-u1);
            rep.unitarity = std::max(rep.unitarity,
                                     detail::rel_max_norm(lhs + xi * Matrix::Identity(4, 4), lhs));
        }
        {   // crossing: R12(u) = V1 R12^{t2}(-u-eta) V1, V = -i sigma^y
            const M2 v = cplx(0, -1) * detail::pauli(1);
            const Matrix v1 = detail::kron(v, eye2);
            const Matrix rhs = v1 * detail::partial_transpose_2(r_matrix(-u1 - p.eta, p)) * v1;
            rep.crossing = std::max(rep.crossing, detail::rel_max_norm(r12(u1) - rhs, rhs));
        }
        {   // PT and Z2 symmetries
            const Matrix r = r12(u1);
            rep.pt_symmetry = std::max(rep.pt_symmetry, detail::rel_max_norm(r - r21(u1), r));
            rep.pt_symmetry = std::max(rep.pt_symmetry,
                                       detail::rel_max_norm(r - r.transpose().eval(), r));
            for (int i = 0; i < 3; ++i) {
                const Matrix ss = detail::kron(detail::pauli(i), detail::pauli(i));
                rep.z2_symmetry = std::max(rep.z2_symmetry,
                                           detail::rel_max_norm(ss * r - r * ss, r));
            }
        }
    }

    rep.initial_condition = detail::rel_max_norm(r12(cplx(0, 0)) - perm, perm);
    const Matrix antisym = r12(-p.eta) + (Matrix::Identity(4, 4) - perm);
    rep.antisymmetry = antisym.cwiseAbs().maxCoeff();

    {   // transfer matrices at two generic points commute
        ModelParams q = p;
        if (q.n_sites > 6) {
            q = ModelParams(p.tau, p.eta, p.eta_kind, 4, p.beta_minus, p.beta_plus);
        }
        const Matrix ta = transfer_matrix(cplx(0.13, 0.021), q);
        const Matrix tb = transfer_matrix(cplx(0.41, -0.035), q);
        rep.commutator = (ta * tb - tb * ta).norm() / (ta.norm() * tb.norm());
    }
    return rep;
}

}  // namespace xyzopen::lattice
