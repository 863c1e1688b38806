#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "test_params.hpp"
#include "xyzopen/spectrum.hpp"

using namespace xyzopen;
using namespace xyzopen::lattice;
using namespace xyzopen::spectrum;

TEST_CASE("diagonalize produces a simultaneous eigenbasis", "[spectrum]")
{
    const auto p = testpar::real_large(4);
    const auto slice = diagonalize(p, SolveMethod::Dense);

    REQUIRE(slice.energies.size() == 16);
    CHECK(std::is_sorted(slice.energies.begin(), slice.energies.end()));
    for (size_t i = 0; i < slice.energies.size(); ++i) {
        CHECK(slice.h_residuals[i] < 1e-9);
        CHECK(slice.t_residuals[i] < 1e-8);
    }
}

TEST_CASE("iterative and dense ground states agree", "[spectrum]")
{
    for (const auto& p : {testpar::real_large(8), testpar::imag_large(8)}) {
        const auto dense = diagonalize(p, SolveMethod::Dense);
        const auto iter = diagonalize(p, SolveMethod::IterativeGroundAndFirst);
        REQUIRE(iter.energies.size() == 2);
        CHECK(std::abs(dense.energies[0] - iter.energies[0]) < 1e-10);
        CHECK(std::abs(dense.energies[1] - iter.energies[1]) < 1e-10);
    }

    auto bad = testpar::real_large(4);
    bad.beta_minus[2] = cplx(0.3, 0.03);  // out of the Hermitian region
    CHECK_THROWS_AS(diagonalize(bad, SolveMethod::IterativeGroundAndFirst), std::domain_error);
}

TEST_CASE("Lambda special values and functional relations", "[spectrum]")
{
    const int n = 3;
    for (bool real_eta : {true, false}) {
        const auto kind = real_eta ? EtaKind::Real : EtaKind::PureImaginary;
        const auto p = real_eta ? testpar::real_large(n, testpar::generic_thetas(n, kind))
                                : testpar::imag_large(n, testpar::generic_thetas(n, kind));
        const auto basis = family_eigenstates(p);
        for (int s = 0; s < 8; ++s) {
            CHECK(basis.t_residuals[static_cast<size_t>(s)] < 1e-8);
            const auto rep = validate_functional_relations(basis.states.col(s), p);
            CHECK(rep.fusion < 1e-8);
            CHECK(rep.value_at_zero < 1e-8);
            CHECK(rep.value_at_half < 1e-8);
            CHECK(rep.value_at_tau_half < 1e-8);
            CHECK(rep.value_at_half_sum < 1e-8);
            CHECK(rep.crossing < 1e-9);
            CHECK(rep.period_one < 1e-8);
            CHECK(rep.period_tau < 1e-8);
        }
    }
}

TEST_CASE("lambda_eval flags residuals and reproduces Lambda(0)", "[spectrum]")
{
    const auto p = testpar::real_large(3);
    const auto slice = diagonalize(p, SolveMethod::Dense);

    const auto le = lambda_eval(cplx(0, 0), slice.states.col(0), p);
    const cplx expect = elliptic::sigma(2.0 * p.eta, p.tau) / elliptic::sigma(p.eta, p.tau);
    CHECK(std::abs(le.value - expect) / std::abs(expect) < 1e-10);
    CHECK(le.residual < 1e-8);

    // a random vector is not an eigenstate of the family
    lattice::Vector junk = lattice::Vector::Zero(slice.states.rows());
    junk[0] = 0.8;
    junk[3] = 0.6;
    CHECK(lambda_eval(cplx(0.2, 0.1), junk, p).residual > 1e-3);
}

TEST_CASE("zero-root extraction on small chains", "[spectrum]")
{
    for (bool real_eta : {true, false}) {
        const auto p = real_eta ? testpar::real_large(6) : testpar::imag_large(6);
        const auto slice = diagonalize(p, SolveMethod::Dense);
        for (int s : {0, 1}) {
            const auto rs = find_zero_roots(slice.states.col(s), p);
            REQUIRE(rs.roots.size() == 9);  // N + 3
            CHECK(reconstruction_error(rs, slice.states.col(s), p) < 1e-7);
            CHECK(std::abs(energy_from_roots(rs, p) - slice.energies[static_cast<size_t>(s)])
                  < 1e-7);
        }
    }
}

TEST_CASE("root multiset is closed under conjugation", "[spectrum]")
{
    const auto p = testpar::real_large(6);
    const double im_tau = p.tau.value.imag();
    const auto slice = diagonalize(p, SolveMethod::Dense);
    const auto rs = find_zero_roots(slice.states.col(0), p);
    for (const cplx& z : rs.roots) {
        double best = 1e9;
        for (const cplx& other : rs.roots)
            best = std::min(best, spectrum::detail::root_distance(std::conj(z), other, im_tau));
        CHECK(best < 1e-7);
    }
}

TEST_CASE("classification of the N=8 ground-state pattern", "[spectrum]")
{
    const auto p = testpar::real_large(8);
    const auto slice = diagonalize(p, SolveMethod::Dense);
    auto rs = find_zero_roots(slice.states.col(0), p);
    REQUIRE(rs.roots.size() == 11);
    classify_roots(rs, p, 0.05);

    int fixed = 0, strings = 0, bulk = 0, unknown = 0;
    for (const auto t : rs.tags) {
        if (t == RootTag::FixedPair) ++fixed;
        if (t == RootTag::BoundaryString) ++strings;
        if (t == RootTag::BulkLine) ++bulk;
        if (t == RootTag::Unknown) ++unknown;
    }
    CHECK(fixed == 2);
    CHECK(strings == 4);
    CHECK(bulk == 5);
    CHECK(unknown == 0);

    // fixed pair w1 = (1-eta)/2 i, w2 = tau/2i + (1-eta)/2 i located to 5e-2
    const double im_tau = p.tau.value.imag();
    for (const cplx pred : {cplx(0, 1) * cplx(0, 0.15), cplx(0, 1) * cplx(0.3, 0.15)}) {
        double best = 1e9;
        for (const cplx& z : rs.roots)
            best = std::min(best, spectrum::detail::root_distance(z, pred, im_tau));
        CHECK(best < 5e-2);
    }
}

TEST_CASE("conjugate-pair bulk pattern in the small-eta window", "[spectrum]")
{
    const auto p = testpar::real_small(8, 0.4);
    const auto slice = diagonalize(p, SolveMethod::Dense);
    auto rs = find_zero_roots(slice.states.col(0), p);
    REQUIRE(rs.roots.size() == 11);
    classify_roots(rs, p, 0.035);

    const int pairs = static_cast<int>(
        std::count(rs.tags.begin(), rs.tags.end(), RootTag::ConjugatePair));
    const int line = static_cast<int>(std::count(rs.tags.begin(), rs.tags.end(), RootTag::BulkLine));
    const int unknown = static_cast<int>(std::count(rs.tags.begin(), rs.tags.end(), RootTag::Unknown));
    CHECK(pairs == 4);
    CHECK(line == 1);  // the even-N root on the i/2 line
    CHECK(unknown == 0);
}

TEST_CASE("energy consistency across the full N=6 spectrum", "[spectrum]")
{
    for (bool real_eta : {true, false}) {
        const auto p = real_eta ? testpar::real_large(6) : testpar::imag_large(6);
        const auto slice = diagonalize(p, SolveMethod::Dense);
        double worst_energy = 0, worst_recon = 0;
        for (int s = 0; s < 64; ++s) {
            const auto rs = find_zero_roots(slice.states.col(s), p);
            REQUIRE(rs.roots.size() == 9);
            worst_recon = std::max(worst_recon,
                                   reconstruction_error(rs, slice.states.col(s), p, 50));
            worst_energy = std::max(worst_energy,
                                    std::abs(energy_from_roots(rs, p)
                                             - slice.energies[static_cast<size_t>(s)]));
        }
        CHECK(worst_energy < 1e-7);
        CHECK(worst_recon < 1e-7);
    }
}
