// Development scratch driver (not installed).
#include <cstdio>
#include <cstdlib>

#include "xyzopen/spectrum.hpp"

using namespace xyzopen;
using namespace xyzopen::lattice;
using namespace xyzopen::spectrum;

static ModelParams real_large(int n)
{
    return ModelParams(elliptic::LatticeTau(cplx(0, 0.6)), cplx(0.7, 0), EtaKind::Real, n,
                       {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)},
                       {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)});
}
static ModelParams imag_large(int n)
{
    return ModelParams(elliptic::LatticeTau(cplx(0, 1.6)), cplx(0, 1.0), EtaKind::PureImaginary, n,
                       {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.04)},
                       {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.08)});
}

int main(int argc, char** argv)
{
    const int n = argc > 1 ? std::atoi(argv[1]) : 8;
    const char kind = argc > 2 ? argv[2][0] : (char)114;
    const int nstates = argc > 3 ? std::atoi(argv[3]) : 2;

    ModelParams p = kind == 105 ? imag_large(n) : kind == 115 ? ModelParams(elliptic::LatticeTau(cplx(0, 0.6)), cplx(0.4, 0), EtaKind::Real, n, {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)}, {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)}) : kind == 116 ? ModelParams(elliptic::LatticeTau(cplx(0, 1.6)), cplx(0, 0.7), EtaKind::PureImaginary, n, {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.03)}, {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.05)}) : real_large(n);
    auto slice = diagonalize(p, SolveMethod::Dense);
    std::printf("E0=%.12f E1=%.12f gap=%.6e\n", slice.energies[0], slice.energies[1],
                slice.energies[1] - slice.energies[0]);

    for (int s = 0; s < nstates; ++s) {
        try {
            auto rs = find_zero_roots(slice.states.col(s), p);
            std::printf("state %d: %zu roots\n", s, rs.roots.size());
            for (const cplx& z : rs.roots) {
                const cplx zb = cplx(0, -1) * z;
                std::printf("  z=(%+.6f,%+.6f)  zbar=(%+.6f,%+.6f)\n", z.real(), z.imag(),
                            zb.real(), zb.imag());
            }
            std::printf("  recon err = %.3e\n", reconstruction_error(rs, slice.states.col(s), p));
            const double er = energy_from_roots(rs, p);
            std::printf("  E_roots = %.12f  diff = %.3e\n", er,
                        std::abs(er - slice.energies[s]));
        } catch (const std::exception& e) {
            std::printf("state %d: FAILED: %s\n", s, e.what());
        }
    }
    return 0;
}
