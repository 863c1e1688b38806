#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "xyzopen/lattice.hpp"
#include "xyzopen/parallel.hpp"
#include "xyzopen/thermo.hpp"

// Diagonalization of the commuting family, evaluation of the transfer-matrix
// eigenvalue Lambda(u) per state, extraction and classification of its N+3
// zero roots, and the functional-relation certificates.
namespace xyzopen::spectrum {

using lattice::Matrix;
using lattice::ModelParams;
using lattice::Vector;

enum class SolveMethod { Dense, IterativeGroundAndFirst };

/// Simultaneously diagonalized eigenpairs of {H, t(u0)}.  Degenerate H
/// eigenspaces are rotated to diagonalize t at the resolver point u0, and
/// states are ordered by (E, Re Lambda(u0), Im Lambda(u0)).
struct SpectrumSlice {
    std::vector<double> energies;
    Matrix states;  // one column per state
    cplx resolver_point;
    std::vector<cplx> t_eigenvalues_at_u0;
    std::vector<double> h_residuals;
    std::vector<double> t_residuals;
};

inline constexpr cplx kDefaultResolverPoint{0.11, 0.07};

namespace detail {

// Matrix-free H|v> using the bit layout of lattice::hamiltonian.
inline void apply_hamiltonian(const ModelParams& p, const lattice::CouplingSet& cs,
                              const Vector& in, Vector& out)
{
    const Eigen::Index dim = p.dim();
    out.setZero(dim);
    const int n = p.n_sites;
    for (Eigen::Index s = 0; s < dim; ++s) {
        const cplx amp = in[s];
        if (amp == cplx(0, 0)) continue;
        for (int j = 0; j + 1 < n; ++j) {
            const int b1 = (s >> j) & 1, b2 = (s >> (j + 1)) & 1;
            const Eigen::Index f = s ^ (Eigen::Index(1) << j) ^ (Eigen::Index(1) << (j + 1));
            out[f] += (cs.jx + (b1 == b2 ? -cs.jy : cs.jy)) * amp;
            out[s] += (b1 == b2 ? cs.jz : -cs.jz) * amp;
        }
        {
            const int b = static_cast<int>(s & 1);
            out[s ^ 1] += (cs.hx_minus + (b ? cplx(0, -1) : cplx(0, 1)) * cs.hy_minus) * amp;
            out[s] += (b ? -1.0 : 1.0) * cs.hz_minus * amp;
        }
        {
            const Eigen::Index m = Eigen::Index(1) << (n - 1);
            const int b = (s & m) ? 1 : 0;
            out[s ^ m] += (cs.hx_plus + (b ? cplx(0, -1) : cplx(0, 1)) * cs.hy_plus) * amp;
            out[s] += (b ? -1.0 : 1.0) * cs.hz_plus * amp;
        }
    }
}

// Lanczos with full reorthogonalization; returns the lowest n_want Ritz pairs.
inline std::pair<std::vector<double>, Matrix>
lanczos_lowest(const ModelParams& p, const lattice::CouplingSet& cs, int n_want)
{
    const Eigen::Index dim = p.dim();
    const int m_max = static_cast<int>(std::min<Eigen::Index>(dim, 420));

    Matrix q(dim, m_max);
    std::vector<double> alpha, beta;

    Vector v(dim);
    for (Eigen::Index i = 0; i < dim; ++i)
        v[i] = 1.0 + 0.37 * std::sin(1.7 * double(i) + 0.3);
    v.normalize();
    q.col(0) = v;

    Vector w(dim);
    int m = 0;
    for (int j = 0; j < m_max; ++j) {
        apply_hamiltonian(p, cs, q.col(j), w);
        if (j > 0) w -= beta[static_cast<size_t>(j - 1)] * q.col(j - 1);
        const double a = std::real(q.col(j).dot(w));
        alpha.push_back(a);
        w -= a * q.col(j);
        // two passes of reorthogonalization keep the basis clean
        for (int pass = 0; pass < 2; ++pass)
            w -= q.leftCols(j + 1) * (q.leftCols(j + 1).adjoint() * w);
        const double b = w.norm();
        m = j + 1;
        if (b < 1e-13) break;
        if (j + 1 < m_max) {
            beta.push_back(b);
            q.col(j + 1) = w / b;
        }

        if (m >= 40 && m % 20 == 0) {
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
            for (int i = 0; i < m; ++i) tri(i, i) = alpha[static_cast<size_t>(i)];
            for (int i = 0; i + 1 < m; ++i)
                tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<size_t>(i)];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            const double scale = std::max(1.0, std::abs(es.eigenvalues()(m - 1)));
            double worst = 0;
            for (int k = 0; k < n_want; ++k)
                worst = std::max(worst, b * std::abs(es.eigenvectors()(m - 1, k)));
            if (worst < 1e-11 * scale) break;
        }
    }

    Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) tri(i, i) = alpha[static_cast<size_t>(i)];
    for (int i = 0; i + 1 < m; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[static_cast<size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);

    const int k = std::min(n_want, m);
    std::vector<double> evals(static_cast<size_t>(k));
    Matrix vecs(dim, k);
    for (int i = 0; i < k; ++i) {
        evals[static_cast<size_t>(i)] = es.eigenvalues()(i);
        vecs.col(i) = q.leftCols(m) * es.eigenvectors().col(i).cast<cplx>();
        vecs.col(i).normalize();
    }
    return {evals, vecs};
}

}  // namespace detail

/// <psi| t(u) |psi> / <psi|psi> together with the eigen-residual
/// ||t(u) psi - Lambda psi|| / ||t(u) psi||.
struct LambdaEval {
    cplx value;
    double residual;
};

inline LambdaEval lambda_eval(cplx u, const Vector& state, const ModelParams& p)
{
    const Vector tpsi = lattice::apply_transfer(u, p, state);
    const cplx nrm2 = state.dot(state);
    const cplx lam = state.dot(tpsi) / nrm2;
    const double res = (tpsi - lam * state).norm() / std::max(tpsi.norm(), 1e-300);
    return {lam, res};
}

/// Diagonalize H; within degenerate eigenspaces rotate the basis so that
/// t(u0) is diagonal as well.  The iterative route returns the lowest two
/// states only and requires a Hermitian (in-region) Hamiltonian.
inline SpectrumSlice diagonalize(const ModelParams& p, SolveMethod how,
                                 cplx resolver_point = kDefaultResolverPoint)
{
    if (!p.homogeneous())
        throw std::domain_error("diagonalize: H and t(u) commute only at the homogeneous "
                                "point; use family_eigenstates for inhomogeneous parameters");
    SpectrumSlice out;
    out.resolver_point = resolver_point;

    const lattice::CouplingSet cs = lattice::couplings(p);
    const double herm_defect = cs.max_imag();

    Matrix states;
    std::vector<double> energies;

    if (how == SolveMethod::Dense) {
        if (p.n_sites > 12) throw std::domain_error("diagonalize: dense route capped at N=12");
        const Matrix h = lattice::hamiltonian(p, cs);
        if (herm_defect > 1e-8)
            throw std::domain_error("diagonalize: non-Hermitian parameters are unsupported");
        Eigen::SelfAdjointEigenSolver<Matrix> es(h);
        energies.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
        states = es.eigenvectors();
    } else {
        if (p.n_sites > 16) throw std::domain_error("diagonalize: iterative route capped at N=16");
        if (herm_defect > 1e-8)
            throw std::domain_error("diagonalize: iterative route requires Hermitian parameters");
        auto [evals, vecs] = detail::lanczos_lowest(p, cs, 2);
        energies = std::move(evals);
        states = std::move(vecs);
    }

    const int n_states = static_cast<int>(energies.size());
    const double e_scale = std::max(1.0, std::max(std::abs(energies.front()),
                                                  std::abs(energies.back())));
    const double deg_tol = 1e-8 * e_scale;

    // Resolve degeneracies with t(u0); the family restricted to a degenerate
    // eigenspace is normal, so its eigenbasis is orthogonal.
    for (int lo = 0; lo < n_states;) {
        int hi = lo + 1;
        while (hi < n_states && energies[static_cast<size_t>(hi)]
                                    - energies[static_cast<size_t>(hi - 1)] < deg_tol)
            ++hi;
        const int k = hi - lo;
        if (k > 1) {
            Matrix tv(states.rows(), k);
            for (int i = 0; i < k; ++i)
                tv.col(i) = lattice::apply_transfer(resolver_point, p, states.col(lo + i));
            const Matrix block = states.middleCols(lo, k).adjoint() * tv;
            Eigen::ComplexEigenSolver<Matrix> bes(block);
            Matrix w = bes.eigenvectors();
            // order group members by (Re, Im) of the block eigenvalue
            std::vector<int> order(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) order[static_cast<size_t>(i)] = i;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                const cplx la = bes.eigenvalues()(a), lb = bes.eigenvalues()(b);
                if (std::abs(la.real() - lb.real()) > 1e-12 * std::max(1.0, std::abs(la)))
                    return la.real() < lb.real();
                return la.imag() < lb.imag();
            });
            Matrix ws(k, k);
            for (int i = 0; i < k; ++i) ws.col(i) = w.col(order[static_cast<size_t>(i)]);
            Matrix rotated = states.middleCols(lo, k) * ws;
            // re-orthonormalize in order (the block is normal up to roundoff)
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < i; ++j)
                    rotated.col(i) -= rotated.col(j).dot(rotated.col(i)) * rotated.col(j);
                rotated.col(i).normalize();
            }
            states.middleCols(lo, k) = rotated;
        }
        lo = hi;
    }

    out.energies = energies;
    out.states = states;
    out.t_eigenvalues_at_u0.resize(static_cast<size_t>(n_states));
    out.t_residuals.resize(static_cast<size_t>(n_states));
    out.h_residuals.resize(static_cast<size_t>(n_states));

    const Matrix h = (p.n_sites <= 12) ? lattice::hamiltonian(p, cs) : Matrix();
    for (int i = 0; i < n_states; ++i) {
        const auto le = lambda_eval(resolver_point, states.col(i), p);
        out.t_eigenvalues_at_u0[static_cast<size_t>(i)] = le.value;
        out.t_residuals[static_cast<size_t>(i)] = le.residual;
        if (h.size() > 0) {
            const Vector hv = h * states.col(i);
            out.h_residuals[static_cast<size_t>(i)] =
                (hv - energies[static_cast<size_t>(i)] * states.col(i)).norm();
        } else {
            Vector hv(p.dim());
            detail::apply_hamiltonian(p, cs, states.col(i), hv);
            out.h_residuals[static_cast<size_t>(i)] =
                (hv - energies[static_cast<size_t>(i)] * states.col(i)).norm();
        }
    }
    return out;
}

/// Eigenbasis of the commuting family itself, from a dense solve of t(u0).
/// This is the right basis when inhomogeneities are present (H is then not a
/// member of the family).  The family is normal for the physical parameter
/// directions, so the basis is orthonormal up to the reported residuals.
struct FamilyBasis {
    Matrix states;
    std::vector<cplx> lambdas_at_u0;
    std::vector<double> t_residuals;
    cplx resolver_point;
};

inline FamilyBasis family_eigenstates(const ModelParams& p,
                                      cplx resolver_point = kDefaultResolverPoint)
{
    if (p.n_sites > 12) throw std::domain_error("family_eigenstates: capped at N=12");
    const Matrix t0 = lattice::transfer_matrix(resolver_point, p);
    Eigen::ComplexEigenSolver<Matrix> es(t0);

    const Eigen::Index dim = t0.rows();
    std::vector<int> order(static_cast<size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) order[static_cast<size_t>(i)] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const cplx la = es.eigenvalues()(a), lb = es.eigenvalues()(b);
        if (std::abs(la.real() - lb.real()) > 1e-12 * std::max(1.0, std::abs(la)))
            return la.real() < lb.real();
        return la.imag() < lb.imag();
    });

    FamilyBasis out;
    out.resolver_point = resolver_point;
    out.states.resize(dim, dim);
    out.lambdas_at_u0.resize(static_cast<size_t>(dim));
    out.t_residuals.resize(static_cast<size_t>(dim));
    for (Eigen::Index i = 0; i < dim; ++i) {
        const int src = order[static_cast<size_t>(i)];
        out.states.col(i) = es.eigenvectors().col(src).normalized();
        const Vector tv = lattice::apply_transfer(resolver_point, p, out.states.col(i));
        const cplx lam = out.states.col(i).dot(tv);
        out.lambdas_at_u0[static_cast<size_t>(i)] = lam;
        out.t_residuals[static_cast<size_t>(i)] =
            (tv - lam * out.states.col(i)).norm() / std::max(tv.norm(), 1e-300);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Zero roots of Lambda(u)
// ---------------------------------------------------------------------------

enum class RootTag { BulkLine, ConjugatePair, BoundaryString, FixedPair, Unknown };

inline const char* to_string(RootTag t)
{
    switch (t) {
        case RootTag::BulkLine: return "bulk_line";
        case RootTag::ConjugatePair: return "conjugate_pair";
        case RootTag::BoundaryString: return "boundary_string";
        case RootTag::FixedPair: return "fixed_pair";
        default: return "unknown";
    }
}

/// The N+3 zero roots of Lambda(u), reduced to the fundamental domain with
/// the +- pairing fixed, plus the overall coefficient Lambda_0.
struct RootSet {
    std::vector<cplx> roots;  // z-plane representatives
    std::vector<RootTag> tags;
    cplx lambda0{};
};

struct RootFindOptions {
    int grid = 80;
    int max_rescans = 2;
    double newton_tol = 1e-12;
    int max_newton = 80;
    double classify_threshold = 0.03;
    unsigned n_threads = 2;
};

struct RootFindError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

// Reduce z into Re in [-1/2,1/2), Im in [-Im(tau)/2, Im(tau)/2).
inline cplx reduce_cell(cplx z, double im_tau)
{
    double re = z.real() - std::floor(z.real() + 0.5);
    double im = z.imag() - im_tau * std::floor(z.imag() / im_tau + 0.5);
    if (re >= 0.5) re -= 1.0;
    if (im >= 0.5 * im_tau) im -= im_tau;
    return {re, im};
}

inline double torus_distance(cplx a, cplx b, double im_tau)
{
    const cplx d = reduce_cell(a - b, im_tau);
    return std::abs(d);
}

// Canonical representative among +-z modulo the lattice: smallest |Im|,
// then smallest |Re|, ties broken toward nonnegative parts.
inline cplx canonical_root(cplx z, double im_tau)
{
    const cplx a = reduce_cell(z, im_tau);
    const cplx b = reduce_cell(-z, im_tau);
    const double eps = 1e-12;
    if (std::abs(a.imag()) < std::abs(b.imag()) - eps) return a;
    if (std::abs(b.imag()) < std::abs(a.imag()) - eps) return b;
    if (std::abs(a.real()) < std::abs(b.real()) - eps) return a;
    if (std::abs(b.real()) < std::abs(a.real()) - eps) return b;
    if (a.imag() > -eps && (b.imag() < -eps || a.real() >= b.real())) return a;
    return b;
}

struct FoundRoot {
    cplx position;
    int multiplicity = 1;
};

}  // namespace detail

/// Locates all zeros of Lambda(u) in one fundamental cell by a coarse
/// |Lambda| grid scan plus Newton polishing with deflation, verifies
/// multiplicities by phase winding, and maps them to the N+3 paired roots
/// z = u + eta/2.  Lambda_0 is fixed afterwards from a generic probe.
inline RootSet find_zero_roots(const Vector& state, const ModelParams& p,
                               const RootFindOptions& opts = {})
{
    const double im_tau = p.tau.value.imag();
    const int n_expected = 2 * p.n_sites + 6;

    const Vector psi = state.normalized();
    // Lambda(u) is entire, but t(u) passes through K-matrix poles where the
    // sandwich cannot be evaluated; report those grid hits as huge.
    auto lam = [&](cplx u) -> cplx {
        try {
            return psi.dot(lattice::apply_transfer(u, p, psi));
        } catch (const std::domain_error&) {
            return cplx(1e300, 0);
        }
    };

    std::vector<detail::FoundRoot> found;
    auto near_found = [&](cplx u, double tol) -> int {
        for (size_t i = 0; i < found.size(); ++i)
            if (detail::torus_distance(u, found[i].position, im_tau) < tol)
                return static_cast<int>(i);
        return -1;
    };

    // sigma vanishes on the whole lattice, so dividing by the unreduced
    // sigma(u - r) deflates the root together with all its periodic copies.
    auto deflated = [&](cplx u) {
        cplx v = lam(u);
        for (const auto& r : found)
            for (int m = 0; m < r.multiplicity; ++m)
                v /= elliptic::sigma(u - r.position, p.tau);
        return v;
    };

    auto polish = [&](cplx u0) -> std::optional<cplx> {
        cplx u = u0;
        for (int it = 0; it < opts.max_newton; ++it) {
            const double h = 1e-7;
            const cplx f = deflated(u);
            const cplx fp = (deflated(u + h) - deflated(u - h)) / (2 * h);
            if (!(std::abs(fp) > 0) || !std::isfinite(std::abs(fp))) return std::nullopt;
            cplx step = -f / fp;
            if (std::abs(step) > 0.25) step *= 0.25 / std::abs(step);
            u += step;
            if (std::abs(u.real()) > 1.2 || u.imag() < -0.7 * im_tau || u.imag() > 1.7 * im_tau)
                return std::nullopt;
            if (std::abs(step) < opts.newton_tol) return u;
        }
        return std::nullopt;
    };

    // Number of zeros inside a small circle around r by phase winding.
    auto winding = [&](cplx r, double radius) {
        const int samples = 48;
        double total = 0, prev = 0;
        for (int i = 0; i <= samples; ++i) {
            const double a = 2 * kPi * i / samples + 1e-3;
            const cplx v = lam(r + radius * cplx(std::cos(a), std::sin(a)));
            const double arg = std::arg(v);
            if (i > 0) {
                double d = arg - prev;
                while (d > kPi) d -= 2 * kPi;
                while (d < -kPi) d += 2 * kPi;
                total += d;
            }
            prev = arg;
        }
        return static_cast<int>(std::lround(total / (2 * kPi)));
    };

    auto safe_radius = [&](const detail::FoundRoot& fr) {
        double radius = 0.01;
        for (const auto& other : found)
            if (&other != &fr)
                radius = std::min(radius, 0.45 * detail::torus_distance(fr.position, other.position,
                                                                        im_tau));
        return std::max(radius, 1e-6);
    };

    // Registers a polished zero of the deflated function: either a new
    // position, or (if it landed exactly on a known root, which can only
    // happen when the deflated function still vanishes there) a higher
    // multiplicity, confirmed by the winding count.
    auto try_register = [&](cplx r_pos) -> bool {
        const cplx rr = detail::reduce_cell(r_pos, im_tau);
        const int idx = near_found(rr, 2e-6);
        if (idx < 0) {
            found.push_back({rr, 1});
            return true;
        }
        auto& fr = found[static_cast<size_t>(idx)];
        if (detail::torus_distance(rr, fr.position, im_tau) < 1e-7) {
            const int w = winding(fr.position, safe_radius(fr));
            if (w > fr.multiplicity) {
                fr.multiplicity = w;
                return true;
            }
        }
        return false;
    };

    int grid = opts.grid;
    for (int attempt = 0; attempt <= opts.max_rescans; ++attempt, grid *= 2) {
        const double dx = 1.0 / grid;
        const double dy = im_tau / grid;
        const int ny = grid + 5;  // two extra rows beyond each cell edge
        const int nx = grid;

        std::vector<double> mag(static_cast<size_t>(nx * ny));
        std::vector<cplx> pts(static_cast<size_t>(nx * ny));
        parallel_for(static_cast<size_t>(ny), [&](size_t iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const cplx u(-0.5 + ix * dx, (static_cast<int>(iy) - 2) * dy);
                pts[iy * nx + ix] = u;
                mag[iy * nx + ix] = std::abs(lam(u));
            }
        }, opts.n_threads);

        std::vector<cplx> candidates;
        for (int iy = 1; iy + 1 < ny; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                const double v = mag[static_cast<size_t>(iy * nx + ix)];
                bool is_min = true;
                for (int ddy = -1; ddy <= 1 && is_min; ++ddy)
                    for (int ddx = -1; ddx <= 1; ++ddx) {
                        if (!ddx && !ddy) continue;
                        const int jx = (ix + ddx + nx) % nx;  // x is periodic
                        if (mag[static_cast<size_t>((iy + ddy) * nx + jx)] < v) {
                            is_min = false;
                            break;
                        }
                    }
                if (is_min) candidates.push_back(pts[static_cast<size_t>(iy * nx + ix)]);
            }
        }

        // Deflation sweeps: repeat until no candidate produces a new zero,
        // so close pairs hiding in one grid basin are pulled apart.
        for (int sweep = 0; sweep < 4; ++sweep) {
            bool progress = false;
            for (const cplx& c : candidates) {
                const auto r = polish(c);
                if (r && try_register(*r)) progress = true;
            }
            if (!progress) break;
        }

        // Verify every multiplicity by its winding number; when the circle
        // holds more zeros than registered, look for the extras from starts
        // on the circle.
        for (int round = 0; round < 3; ++round) {
            bool consistent = true;
            for (size_t i = 0; i < found.size(); ++i) {
                const double radius = safe_radius(found[i]);
                const int w = winding(found[i].position, radius);
                if (w <= found[i].multiplicity) continue;
                consistent = false;
                bool split = false;
                for (int a = 0; a < 8; ++a) {
                    const double ang = 2 * kPi * a / 8.0;
                    const auto r = polish(found[i].position
                                          + 0.5 * radius * cplx(std::cos(ang), std::sin(ang)));
                    if (r && try_register(*r)) split = true;
                }
                if (!split) found[i].multiplicity = w;
            }
            if (consistent) break;
        }

        int total = 0;
        for (const auto& fr : found) total += fr.multiplicity;

        // Zeros exponentially close to the removable 0/0 points of the
        // K-matrices defeat Newton (the sandwich is noise-dominated there).
        // Recover them by contour moments on small circles around those
        // points: the winding gives the count, log-derivative moments the
        // positions.
        if (total < n_expected) {
            std::vector<cplx> special;
            for (const cplx base : {cplx(0, 0), cplx(-0.5, 0), -0.5 * p.tau.value,
                                    -0.5 * (1.0 + p.tau.value)}) {
                for (const cplx offs : {cplx(0, 0), -p.eta}) {
                    const cplx c = detail::reduce_cell(base + offs, im_tau);
                    for (double sx : {-1.0, 0.0, 1.0})
                        for (double sy : {0.0, 1.0}) {
                            const cplx sp = c + cplx(sx, sy * im_tau);
                            if (std::abs(sp.real()) <= 0.55 && sp.imag() > -0.1 * im_tau
                                && sp.imag() < 1.1 * im_tau)
                                special.push_back(sp);
                        }
                }
            }
            for (const cplx& sp : special) {
                if (near_found(sp, 4e-3) >= 0) continue;
                const double rho = 2e-3;
                const int w = winding(sp, rho);
                if (w < 1 || w > 2) continue;
                const int ns = 96;
                std::vector<cplx> us(ns + 1), vs(ns + 1);
                for (int k = 0; k <= ns; ++k) {
                    const double a = 2 * kPi * k / ns + 5e-4;
                    us[static_cast<size_t>(k)] = sp + rho * cplx(std::cos(a), std::sin(a));
                    vs[static_cast<size_t>(k)] = lam(us[static_cast<size_t>(k)]);
                }
                cplx m1(0, 0), m2(0, 0);
                for (int k = 0; k < ns; ++k) {
                    const cplx dlog = std::log(vs[static_cast<size_t>(k + 1)] / vs[static_cast<size_t>(k)]);
                    const cplx um = 0.5 * (us[static_cast<size_t>(k + 1)] + us[static_cast<size_t>(k)]);
                    m1 += um * dlog;
                    m2 += um * um * dlog;
                }
                const cplx two_pi_i(0, 2 * kPi);
                m1 /= two_pi_i;
                m2 /= two_pi_i;
                if (w == 1) {
                    if (try_register(m1)) ++total;
                } else {
                    const cplx sum = m1, sq = m2;
                    const cplx prod = 0.5 * (sum * sum - sq);
                    const cplx disc = std::sqrt(sum * sum - 4.0 * prod);
                    for (const cplx z : {0.5 * (sum + disc), 0.5 * (sum - disc)})
                        if (try_register(z)) ++total;
                }
            }
        }

        if (total == n_expected) break;
        if (attempt == opts.max_rescans)
            throw RootFindError("find_zero_roots: found " + std::to_string(total) + " zeros, expected "
                                + std::to_string(n_expected));
    }

    // Map u-zeros to z = u + eta/2 and consume the +- pairing.
    std::vector<cplx> zs;
    for (const auto& fr : found)
        for (int m = 0; m < fr.multiplicity; ++m)
            zs.push_back(detail::reduce_cell(fr.position + 0.5 * p.eta, im_tau));

    RootSet rs;
    std::vector<bool> used(zs.size(), false);
    for (size_t i = 0; i < zs.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        int partner = -1;
        double best = 1e9;
        for (size_t j = i + 1; j < zs.size(); ++j) {
            if (used[j]) continue;
            const double d = detail::torus_distance(zs[j], -zs[i], im_tau);
            if (d < best) {
                best = d;
                partner = static_cast<int>(j);
            }
        }
        if (partner < 0 || best > 2e-4)
            throw RootFindError("find_zero_roots: unpaired zero root (pairing residual "
                                + std::to_string(best) + ")");
        used[static_cast<size_t>(partner)] = true;
        // Average the two independent measurements of the same root, mapping
        // the partner onto the sheet of zs[i] first.
        const cplx mirrored = zs[i] + detail::reduce_cell(-zs[static_cast<size_t>(partner)] - zs[i],
                                                          im_tau);
        rs.roots.push_back(detail::canonical_root(0.5 * (zs[i] + mirrored), im_tau));
    }
    rs.tags.assign(rs.roots.size(), RootTag::Unknown);

    // Lambda_0 from the probe with the largest reconstruction product.
    auto product = [&](cplx u) {
        cplx prod(1, 0);
        for (const cplx& z : rs.roots)
            prod *= elliptic::sigma(u + z + 0.5 * p.eta, p.tau)
                  * elliptic::sigma(u - z + 0.5 * p.eta, p.tau);
        return prod;
    };
    cplx best_u(0.171, 0.237 * im_tau);
    double best_mag = std::abs(product(best_u));
    for (const cplx cand : {cplx(0, 0), cplx(-0.233, 0.411 * im_tau), cplx(0.391, 0.113 * im_tau)}) {
        const double m = std::abs(product(cand));
        if (m > best_mag) {
            best_mag = m;
            best_u = cand;
        }
    }
    rs.lambda0 = lam(best_u) / product(best_u);
    return rs;
}

/// Relative mismatch between sampled Lambda(u) and the root reconstruction
/// Lambda_0 prod sigma(u+z+eta/2) sigma(u-z+eta/2), maximized over probe
/// points kept away from the zeros.
inline double reconstruction_error(const RootSet& rs, const Vector& state, const ModelParams& p,
                                   int n_probes = 50, unsigned seed = 17)
{
    const double im_tau = p.tau.value.imag();
    const Vector psi = state.normalized();
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.0, im_tau);

    double worst = 0;
    int done = 0;
    while (done < n_probes) {
        const cplx u(ux(rng), uy(rng));
        bool close = false;
        for (const cplx& z : rs.roots) {
            if (detail::torus_distance(u, z - 0.5 * p.eta, im_tau) < 0.04
                || detail::torus_distance(u, -z - 0.5 * p.eta, im_tau) < 0.04) {
                close = true;
                break;
            }
        }
        if (close) continue;
        ++done;
        cplx recon = rs.lambda0;
        for (const cplx& z : rs.roots)
            recon *= elliptic::sigma(u + z + 0.5 * p.eta, p.tau)
                   * elliptic::sigma(u - z + 0.5 * p.eta, p.tau);
        const cplx sampled = psi.dot(lattice::apply_transfer(u, p, psi));
        worst = std::max(worst,
                         std::abs(sampled - recon) / std::max(std::abs(sampled), std::abs(recon)));
    }
    return worst;
}

/// Eigen-energy from the zero roots:
/// sigma(eta)/sigma'(0) [ sum_l (zeta(z_l+eta/2) - zeta(z_l-eta/2))
///                        - (N-1) zeta(eta) - 2 zeta(2 eta) ].
inline double energy_from_roots(const RootSet& rs, const ModelParams& p)
{
    cplx acc(0, 0);
    for (const cplx& z : rs.roots) {
        if (elliptic::detail::lattice_distance(z - 0.5 * p.eta, p.tau.value) < 1e-8
            || elliptic::detail::lattice_distance(z + 0.5 * p.eta, p.tau.value) < 1e-8)
            throw std::domain_error("energy_from_roots: root at a pole of zeta (misextraction)");
        acc += elliptic::zeta(z + 0.5 * p.eta, p.tau) - elliptic::zeta(z - 0.5 * p.eta, p.tau);
    }
    acc -= double(p.n_sites - 1) * elliptic::zeta(p.eta, p.tau)
         + 2.0 * elliptic::zeta(2.0 * p.eta, p.tau);
    const cplx e = elliptic::sigma(p.eta, p.tau) / elliptic::sigma_prime(cplx(0, 0), p.tau) * acc;
    if (std::abs(e.imag()) > 1e-6 * std::max(1.0, std::abs(e.real())))
        throw std::runtime_error("energy_from_roots: energy has a large imaginary part");
    return e.real();
}

// ---------------------------------------------------------------------------
// Root classification
// ---------------------------------------------------------------------------

namespace detail {

// Distance between a z-plane root and a predicted position, minimized over
// the +- pairing and the lattice.
inline double root_distance(cplx z, cplx pred, double im_tau)
{
    return std::min(torus_distance(z, pred, im_tau), torus_distance(z, -pred, im_tau));
}

}  // namespace detail

/// Tags each root as FixedPair / BoundaryString / BulkLine / ConjugatePair by
/// distance to the predicted loci of its regime (fixed-pair positions, the
/// boundary-string laws for both states at the chain's parity, and the bulk
/// lines).  Unmatched roots get Unknown, which is non-fatal.
inline void classify_roots(RootSet& rs, const ModelParams& p, double threshold = 0.03)
{
    const double im_tau = p.tau.value.imag();
    const bool real_eta = (p.eta_kind == lattice::EtaKind::Real);
    const thermo::Parity parity = thermo::parity_of(p.n_sites);

    // predictions in the z-plane
    auto natural_to_z = [&](cplx w) { return real_eta ? cplx(0, 1) * w : w; };

    std::vector<cplx> fixed;
    if (real_eta) {
        const double e = p.eta.real();
        fixed = {natural_to_z(cplx(0, 0.5 * (1.0 - e))),
                 natural_to_z(cplx(0.5 * im_tau, 0.5 * (1.0 - e)))};
    } else {
        fixed = {0.5 * (p.tau.value - p.eta), 0.5 + 0.5 * (p.tau.value - p.eta)};
    }

    std::vector<cplx> strings;
    for (const auto state : {thermo::StateKind::Ground, thermo::StateKind::FirstExcited}) {
        const auto d = thermo::make_dispatch(p, parity, state);
        const auto ss = thermo::select_boundary_strings(d, p);
        for (const cplx& w : ss.all()) strings.push_back(natural_to_z(w));
    }

    const auto d0 = thermo::make_dispatch(p, parity);
    rs.tags.assign(rs.roots.size(), RootTag::Unknown);
    for (size_t i = 0; i < rs.roots.size(); ++i) {
        const cplx z = rs.roots[i];

        bool tagged = false;
        for (const cplx& f : fixed)
            if (detail::root_distance(z, f, im_tau) < threshold) {
                rs.tags[i] = RootTag::FixedPair;
                tagged = true;
                break;
            }
        if (tagged) continue;
        for (const cplx& s : strings)
            if (detail::root_distance(z, s, im_tau) < threshold) {
                rs.tags[i] = RootTag::BoundaryString;
                tagged = true;
                break;
            }
        if (tagged) continue;

        // Bulk loci.  Real eta: the line Im(zbar)=1/2 maps to |Re z| = 1/2 and
        // pairs x +- eta i to |Re z| = eta; imaginary eta uses Im z directly.
        const double line_coord = real_eta ? z.real() : z.imag();
        const double line_target = real_eta ? 0.5 : 0.5 * im_tau;
        const double pair_target = real_eta ? p.eta.real() : p.eta.imag();
        auto near_pm = [&](double x, double t, double period) {
            const double d1 = std::abs(std::remainder(x - t, period));
            const double d2 = std::abs(std::remainder(x + t, period));
            return std::min(d1, d2) < threshold;
        };
        const double period = real_eta ? 1.0 : im_tau;
        if (d0.sub == thermo::SubRegime::Large) {
            if (near_pm(line_coord, line_target, period)) rs.tags[i] = RootTag::BulkLine;
        } else {
            if (near_pm(line_coord, pair_target, period))
                rs.tags[i] = RootTag::ConjugatePair;
            else if (near_pm(line_coord, line_target, period))
                rs.tags[i] = RootTag::BulkLine;  // the even-N root on the half-period line
        }
    }
}

// ---------------------------------------------------------------------------
// Functional relations
// ---------------------------------------------------------------------------

/// Quantum determinant Delta_q(u).
inline cplx quantum_determinant(cplx u, const ModelParams& p)
{
    auto sg = [&](cplx z) { return elliptic::sigma(z, p.tau); };
    const cplx se = sg(p.eta);
    cplx val = -sg(2.0 * u + 2.0 * p.eta) * sg(2.0 * u - 2.0 * p.eta) / (se * se);
    for (const auto& alpha : {p.alpha_minus(), p.alpha_plus()})
        for (const cplx& a : alpha) val *= sg(u + a) * sg(u - a) / (sg(a) * sg(a));
    for (int k = 1; k <= p.n_sites; ++k) {
        const cplx t = p.theta_j(k);
        val *= sg(u + t + p.eta) * sg(u + t - p.eta) * sg(u - t + p.eta) * sg(u - t - p.eta)
             / (se * se * se * se);
    }
    return val;
}

struct FunctionalRelationReport {
    double fusion = 0;
    double value_at_zero = 0;
    double value_at_half = 0;
    double value_at_tau_half = 0;
    double value_at_half_sum = 0;  // u = (1+tau)/2
    double crossing = 0;
    double period_one = 0;
    double period_tau = 0;

    double max() const
    {
        return std::max({fusion, value_at_zero, value_at_half, value_at_tau_half,
                         value_at_half_sum, crossing, period_one, period_tau});
    }
};

/// Per-state residuals of the fusion identity, the four special values of
/// Lambda, crossing symmetry and quasi-periodicity.
inline FunctionalRelationReport validate_functional_relations(const Vector& state,
                                                              const ModelParams& p)
{
    const Vector psi = state.normalized();
    auto lam = [&](cplx u) { return psi.dot(lattice::apply_transfer(u, p, psi)); };
    auto sg = [&](cplx z) { return elliptic::sigma(z, p.tau); };
    auto rel = [](cplx a, cplx b) {
        return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
    };

    FunctionalRelationReport rep;
    const cplx t = p.tau.value;
    const cplx se = sg(p.eta);
    const cplx i_pi(0, kPi);

    for (int j = 1; j <= p.n_sites; ++j) {
        const cplx th = p.theta_j(j);
        const cplx lhs = lam(th) * lam(th - p.eta);
        const cplx rhs = -quantum_determinant(th, p) * se * se
                       / (sg(2.0 * th + p.eta) * sg(2.0 * th - p.eta));
        rep.fusion = std::max(rep.fusion, rel(lhs, rhs));
    }

    const lattice::CouplingSet cs = lattice::couplings(p);
    cplx prod0(1, 0), prod_half(1, 0), prod_tau(1, 0), prod_sum(1, 0), theta_sum(0, 0);
    for (int k = 1; k <= p.n_sites; ++k) {
        const cplx th = p.theta_j(k);
        theta_sum += th;
        prod0 *= sg(p.eta + th) * sg(p.eta - th) / (se * se);
        prod_half *= sg(p.eta + 0.5 + th) * sg(p.eta - 0.5 - th) / (se * se);
        prod_tau *= sg(p.eta + 0.5 * t + th) * sg(p.eta - 0.5 * t - th) / (se * se);
        prod_sum *= sg(p.eta + 0.5 * (1.0 + t) + th) * sg(p.eta - 0.5 * (1.0 + t) - th) / (se * se);
    }
    const double sign = (p.n_sites % 2 == 0) ? -1.0 : 1.0;  // (-1)^(N+1)
    const cplx base = sg(2.0 * p.eta) / se;
    const cplx phase = std::exp(-i_pi * (double(p.n_sites + 3) * p.eta + t - 2.0 * theta_sum));

    rep.value_at_zero = rel(lam(cplx(0, 0)), base * prod0);
    rep.value_at_half = rel(lam(cplx(0.5, 0)), sign * cs.c_minus[2] * cs.c_plus[2] * base * prod_half);
    rep.value_at_tau_half = rel(lam(0.5 * t), sign * cs.c_minus[0] * cs.c_plus[0] * base * phase * prod_tau);
    rep.value_at_half_sum = rel(lam(0.5 * (1.0 + t)),
                                -sign * cs.c_minus[1] * cs.c_plus[1] * base * phase * prod_sum);

    const cplx u(0.2, 0.1);
    rep.crossing = rel(lam(-u - p.eta), lam(u));
    rep.period_one = rel(lam(u + 1.0), lam(u));
    rep.period_tau = rel(lam(u + t),
                         std::exp(cplx(0, -2 * kPi) * double(p.n_sites + 3) * (2.0 * u + p.eta + t))
                             * lam(u));
    return rep;
}

}  // namespace xyzopen::spectrum
