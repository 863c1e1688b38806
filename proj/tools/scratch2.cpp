// Development scratch: thermodynamic formulas vs finite-size energies.
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "xyzopen/spectrum.hpp"
#include "xyzopen/thermo.hpp"

using namespace xyzopen;
using namespace xyzopen::lattice;
using namespace xyzopen::thermo;

static ModelParams make(const char* regime, int n)
{
    using elliptic::LatticeTau;
    if (!std::strcmp(regime, "rl"))
        return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(0.7, 0), EtaKind::Real, n,
                           {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)},
                           {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)});
    if (!std::strcmp(regime, "rs"))
        return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(0.3, 0), EtaKind::Real, n,
                           {cplx(0.02, 0), cplx(0.02, 0), cplx(0, 0.03)},
                           {cplx(0.04, 0), cplx(0.04, 0), cplx(0, 0.04)});
    if (!std::strcmp(regime, "rs2"))
        return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(0.3, 0), EtaKind::Real, n,
                           {cplx(0.02, 0), cplx(0.12, 0), cplx(0, 0.03)},
                           {cplx(0.04, 0), cplx(0.15, 0), cplx(0, 0.04)});
    if (!std::strcmp(regime, "is2"))
        return ModelParams(elliptic::LatticeTau(cplx(0, 1.6)), cplx(0, 0.5),
                           EtaKind::PureImaginary, n,
                           {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.2)},
                           {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.24)});
    if (!std::strcmp(regime, "rs3"))
        return ModelParams(LatticeTau(cplx(0, 0.6)), cplx(0.3, 0), EtaKind::Real, n,
                           {cplx(0.02, 0), cplx(0.05, 0), cplx(0, 0.03)},
                           {cplx(0.04, 0), cplx(0.07, 0), cplx(0, 0.04)});
    if (!std::strcmp(regime, "is3"))
        return ModelParams(elliptic::LatticeTau(cplx(0, 1.6)), cplx(0, 0.5),
                           EtaKind::PureImaginary, n,
                           {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.1)},
                           {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.12)});
    if (!std::strcmp(regime, "il"))
        return ModelParams(LatticeTau(cplx(0, 1.6)), cplx(0, 1.0), EtaKind::PureImaginary, n,
                           {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.04)},
                           {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.08)});
    return ModelParams(elliptic::LatticeTau(cplx(0, 1.6)), cplx(0, 0.5), EtaKind::PureImaginary, n,
                       {cplx(0, 0.04), cplx(0.04, 0), cplx(0, 0.03)},
                       {cplx(0, 0.08), cplx(0.1, 0), cplx(0, 0.05)});
}

int main(int argc, char** argv)
{
    const char* regime = argc > 1 ? argv[1] : "rl";

    for (int n : {6, 8, 10, 12}) {
        const ModelParams p = make(regime, n);
        const auto d = make_dispatch(p);
        const auto eb = surface_energy(d, p);

        const auto slice = spectrum::diagonalize(
            p, n <= 8 ? spectrum::SolveMethod::Dense : spectrum::SolveMethod::IterativeGroundAndFirst);
        const double e0 = slice.energies[0], e1 = slice.energies[1];

        double parity_term = 0;
        if (d.parity == Parity::Odd)
            parity_term = discrete_root_energy(d, p, parity_correction_root(d, p));
        const double disc = e0 - n * eb.e_bulk - parity_term - eb.surface;
        const double gap_disc = (e1 - e0) - eb.excitation;
        std::printf("N=%2d  e_bulk=%+.8f Ef=%+.6f E-=%+.6f E+=%+.6f Es=%+.8f dE=%+.8f | "
                    "D(N)=%+.6f  gapD=%+.6f\n",
                    n, eb.e_bulk, eb.e_free, eb.e_left, eb.e_right, eb.surface, eb.excitation,
                    disc, gap_disc);
    }
    for (int n : {7, 9, 11}) {
        const ModelParams p = make(regime, n);
        const auto d = make_dispatch(p);
        const auto eb = surface_energy(d, p);
        const auto slice = spectrum::diagonalize(
            p, n <= 9 ? spectrum::SolveMethod::Dense : spectrum::SolveMethod::IterativeGroundAndFirst);
        const double parity_term = discrete_root_energy(d, p, parity_correction_root(d, p));
        const double disc = slice.energies[0] - n * eb.e_bulk - parity_term - eb.surface;
        const double gap_disc = (slice.energies[1] - slice.energies[0]) - eb.excitation;
        std::printf("N=%2d  Es=%+.8f dE=%+.8f parity=%+.6f | D(N)=%+.6f  gapD=%+.6f\n",
                    n, eb.surface, eb.excitation, parity_term, disc, gap_disc);
    }
    return 0;
}
