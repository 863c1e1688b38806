#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "test_params.hpp"
#include "xyzopen/lattice.hpp"

using namespace xyzopen;
using namespace xyzopen::lattice;

namespace {

double rel_max(const Matrix& diff, const Matrix& ref)
{
    return diff.cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("coupling constants: ordering and realness", "[lattice]")
{
    {   // real eta: |Jx| > |Jy| > |Jz|, all real
        const auto p = testpar::real_large(4);
        const auto cs = couplings(p);
        CHECK(cs.max_imag() < 1e-10);
        CHECK(std::abs(cs.jx) > std::abs(cs.jy));
        CHECK(std::abs(cs.jy) > std::abs(cs.jz));
    }
    {   // imaginary eta: |Jx| < |Jy| < |Jz|, all real
        const auto p = testpar::imag_large(4);
        const auto cs = couplings(p);
        CHECK(cs.max_imag() < 1e-10);
        CHECK(std::abs(cs.jx) < std::abs(cs.jy));
        CHECK(std::abs(cs.jy) < std::abs(cs.jz));
    }
}

TEST_CASE("R-matrix special points", "[lattice]")
{
    const auto p = testpar::real_large(2);
    const M4 perm = (M4() << 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1).finished();

    CHECK((r_matrix(cplx(0, 0), p) - perm).cwiseAbs().maxCoeff() < 1e-13);

    // Antisymmetry point: R(-eta) = -2 P^(-), a rank-one projector scaled.
    const M4 anti = r_matrix(-p.eta, p);
    CHECK((anti + (M4::Identity() - perm)).cwiseAbs().maxCoeff() < 1e-12);

    // Unitarity at u = 0.23 against the elliptic value of xi(u).
    const cplx u(0.23, 0);
    const M4 prod = r_matrix(u, p) * (perm * r_matrix(-u, p) * perm);
    const cplx xi = elliptic::sigma(u - p.eta, p.tau) * elliptic::sigma(u + p.eta, p.tau)
                  / std::pow(elliptic::sigma(p.eta, p.tau), 2);
    CHECK((prod + xi * M4::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("K-matrix limits and reflection equations", "[lattice]")
{
    const auto p = testpar::real_large(2);

    CHECK((k_minus(cplx(0, 0), p) - M2::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((k_minus(cplx(1e-9, 0), p) - M2::Identity()).cwiseAbs().maxCoeff() < 1e-6);

    for (const auto& q : {testpar::real_large(2), testpar::imag_large(2)}) {
        const auto rep = integrability_report(q, 10, 99);
        CHECK(rep.qybe < 1e-10);
        CHECK(rep.reflection < 1e-10);
        CHECK(rep.dual_reflection < 1e-10);
        CHECK(rep.unitarity < 1e-10);
        CHECK(rep.crossing < 1e-11);
        CHECK(rep.pt_symmetry < 1e-12);
        CHECK(rep.z2_symmetry < 1e-12);
        CHECK(rep.initial_condition < 1e-12);
        CHECK(rep.antisymmetry < 1e-12);
        CHECK(rep.commutator < 1e-9);
    }

    // The literal "-2" shift in the dual reflection equation must fail.
    const auto bad = integrability_report(p, 4, 99, /*literal_dual_shift=*/true);
    CHECK(bad.dual_reflection > 1e-3);
}

TEST_CASE("transfer matrices commute and transform correctly under dagger", "[lattice]")
{
    for (int n : {2, 3, 4, 5}) {
        const auto p = testpar::real_large(n, testpar::generic_thetas(n, EtaKind::Real));
        const Matrix ta = transfer_matrix(cplx(0.13, 0.05), p);
        const Matrix tb = transfer_matrix(cplx(0.41, -0.11), p);
        CHECK((ta * tb - tb * ta).norm() / (ta.norm() * tb.norm()) < 1e-9);
    }
    for (int n : {2, 4}) {
        const auto p = testpar::imag_large(n, testpar::generic_thetas(n, EtaKind::PureImaginary));
        const Matrix ta = transfer_matrix(cplx(0.13, 0.05), p);
        const Matrix tb = transfer_matrix(cplx(0.41, -0.11), p);
        CHECK((ta * tb - tb * ta).norm() / (ta.norm() * tb.norm()) < 1e-9);
    }

    {   // real eta, imaginary thetas: t(u)^dag = t(u*)
        const auto p = testpar::real_large(4, testpar::generic_thetas(4, EtaKind::Real));
        const cplx u(0.21, 0.13);
        const Matrix lhs = transfer_matrix(u, p).adjoint();
        const Matrix rhs = transfer_matrix(std::conj(u), p);
        CHECK(rel_max(lhs - rhs, rhs) < 1e-10);
    }
    {   // imaginary eta, real thetas: t(u)^dag = t(-u*)
        const auto p = testpar::imag_large(4, testpar::generic_thetas(4, EtaKind::PureImaginary));
        const cplx u(0.21, 0.13);
        const Matrix lhs = transfer_matrix(u, p).adjoint();
        const Matrix rhs = transfer_matrix(-std::conj(u), p);
        CHECK(rel_max(lhs - rhs, rhs) < 1e-10);
    }
}

TEST_CASE("Hamiltonian from the transfer matrix matches the direct build", "[lattice]")
{
    for (int n : {2, 3, 4}) {
        const auto p = testpar::real_large(n);
        CHECK(rel_max(hamiltonian(p) - hamiltonian_from_transfer(p), hamiltonian(p)) < 1e-8);
    }
    for (int n : {2, 3}) {
        const auto p = testpar::imag_large(n);
        CHECK(rel_max(hamiltonian(p) - hamiltonian_from_transfer(p), hamiltonian(p)) < 1e-8);
    }
}

TEST_CASE("Hermiticity region check", "[lattice]")
{
    {
        const auto p = testpar::real_large(2);
        CHECK(hermitian_region_check(p).in_region);
        const Matrix h = hamiltonian(p);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
    {   // real eta witness: Re(beta-_3) = 0.3 violates "Re = 0 or 1"
        auto p = testpar::real_large(2);
        p.beta_minus[2] = cplx(0.3, 0.03);
        const auto rc = hermitian_region_check(p);
        CHECK_FALSE(rc.in_region);
        REQUIRE(rc.violated.size() == 1);
        CHECK(rc.violated[0] == "Re(beta-_3)=0 or 1");
        const Matrix h = hamiltonian(p);
        CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-3);
    }
    {   // imaginary eta witness: Re(beta-_1) = 0.5
        auto p = testpar::imag_large(2);
        p.beta_minus[0] = cplx(0.5, 0.04);
        const auto rc = hermitian_region_check(p);
        CHECK_FALSE(rc.in_region);
        REQUIRE(!rc.violated.empty());
        CHECK(rc.violated[0] == "Re(beta-_1)=0 or 1");
    }
}

TEST_CASE("parameter transformations and their physical effects", "[lattice]")
{
    const auto p = testpar::real_large(4);
    const auto cs = couplings(p);

    {   // beta+_1 -> 1 - beta+_1 flips h+_z only
        const auto [q, eff] = apply_parameter_transform(p, ParameterTransform::B1ReflectHalf);
        CHECK(eff.kind == TransformEffectKind::FieldFlip);
        CHECK((!eff.flips_x && !eff.flips_y && eff.flips_z));
        const auto ct = couplings(q);
        CHECK(std::abs(ct.hx_plus - cs.hx_plus) < 1e-12);
        CHECK(std::abs(ct.hy_plus - cs.hy_plus) < 1e-12);
        CHECK(std::abs(ct.hz_plus + cs.hz_plus) < 1e-12);
        CHECK(std::abs(ct.hx_minus - cs.hx_minus) < 1e-12);
    }
    {   // beta+_1 -> beta+_1 + 1 is the parity-swap move for real eta
        const auto [q, eff] = apply_parameter_transform(p, ParameterTransform::B1PlusOne);
        CHECK(eff.kind == TransformEffectKind::ParitySwapEquivalent);
        const auto ct = couplings(q);
        CHECK(std::abs(ct.hx_plus + cs.hx_plus) < 1e-12);
        CHECK(std::abs(ct.hy_plus + cs.hy_plus) < 1e-12);
        CHECK(std::abs(ct.hz_plus - cs.hz_plus) < 1e-12);
    }
    {   // beta+_1 -> beta+_1 + tau flips (y,z) and keeps the spectrum laws
        const auto [q, eff] = apply_parameter_transform(p, ParameterTransform::B1PlusTau);
        CHECK(eff.kind == TransformEffectKind::FieldFlip);
        const auto ct = couplings(q);
        CHECK(std::abs(ct.hx_plus - cs.hx_plus) < 1e-12);
        CHECK(std::abs(ct.hy_plus + cs.hy_plus) < 1e-12);
        CHECK(std::abs(ct.hz_plus + cs.hz_plus) < 1e-12);
    }
    {   // swapping the two edges leaves the spectrum unchanged
        const auto [q, eff] = apply_parameter_transform(p, ParameterTransform::SwapPM);
        CHECK(eff.kind == TransformEffectKind::SpectrumInvariant);
        Eigen::SelfAdjointEigenSolver<Matrix> sa(hamiltonian(p)), sb(hamiltonian(q));
        CHECK((sa.eigenvalues() - sb.eigenvalues()).cwiseAbs().maxCoeff() < 1e-10);
    }
    {   // imaginary eta: the parity-swap move is beta+_1 -> beta+_1 + tau
        const auto pi = testpar::imag_large(3);
        const auto [q1, e1] = apply_parameter_transform(pi, ParameterTransform::B1PlusTau);
        CHECK(e1.kind == TransformEffectKind::ParitySwapEquivalent);
        const auto [q2, e2] = apply_parameter_transform(pi, ParameterTransform::B1PlusOne);
        CHECK(e2.kind == TransformEffectKind::FieldFlip);
    }
}

TEST_CASE("field-free chain has the global spin-flip symmetry", "[lattice]")
{
    const auto p = testpar::real_large(2);
    auto cs = couplings(p);
    cs.hx_minus = cs.hy_minus = cs.hz_minus = 0;
    cs.hx_plus = cs.hy_plus = cs.hz_plus = 0;
    const Matrix h = hamiltonian(p, cs);

    Matrix flip = Matrix::Identity(1, 1);
    for (int j = 0; j < p.n_sites; ++j)
        flip = lattice::detail::kron(flip, lattice::detail::pauli(0));
    CHECK((h * flip - flip * h).cwiseAbs().maxCoeff() < 1e-12);
}
