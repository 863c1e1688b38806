#pragma once

// Shared parameter sets for the test suites.  These are the Hermitian-region
// points used throughout: one per regime (real/imaginary eta, large/small
// anisotropy window), each with generic non-diagonal boundary terms.

#include "xyzopen/lattice.hpp"

namespace testpar {

using xyzopen::cplx;
using xyzopen::lattice::EtaKind;
using xyzopen::lattice::ModelParams;
using xyzopen::elliptic::LatticeTau;

// tau = 0.6i, eta = 0.7 (real, large window)
inline ModelParams real_large(int n, std::vector<cplx> thetas = {})
{
    return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(0.7, 0), EtaKind::Real, n,
                       {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)},
                       {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)}, std::move(thetas));
}

// tau = 0.6i, eta in (0,1/2) (real, small window); eta = 0.4 matches the
// desk-scale root-pattern runs, eta = 0.3 the thermodynamic sweeps.
inline ModelParams real_small(int n, double eta = 0.4, std::vector<cplx> thetas = {})
{
    return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(eta, 0), EtaKind::Real, n,
                       {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)},
                       {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)}, std::move(thetas));
}

// tau = 1.6i, eta = i (imaginary, large window)
inline ModelParams imag_large(int n, std::vector<cplx> thetas = {})
{
    return ModelParams(LatticeTau(cplx(0, 1.6)), cplx(0, 1.0), EtaKind::PureImaginary, n,
                       {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.04)},
                       {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.08)}, std::move(thetas));
}

// tau = 1.6i, Im(eta) in (0, 0.8) (imaginary, small window)
inline ModelParams imag_small(int n, double im_eta = 0.7, std::vector<cplx> thetas = {})
{
    return ModelParams(LatticeTau(cplx(0, 1.6)), cplx(0, im_eta), EtaKind::PureImaginary, n,
                       {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.03)},
                       {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.05)}, std::move(thetas));
}

// Distinct inhomogeneities of magnitude <= 0.05: imaginary for real eta,
// real for imaginary eta (the directions that keep t(u) a normal family).
inline std::vector<cplx> generic_thetas(int n, EtaKind kind, unsigned seed = 5)
{
    std::vector<cplx> out;
    out.reserve(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double v = 0.012 + 0.037 * (j + 1) / double(n) + 1e-4 * ((seed + 7u * j) % 11);
        out.push_back(kind == EtaKind::Real ? cplx(0, v) : cplx(v, 0));
    }
    return out;
}

}  // namespace testpar
