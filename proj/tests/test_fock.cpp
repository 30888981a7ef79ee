#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "qrs/eigensolver.hpp"
#include "qrs/fock.hpp"
#include "qrs/state_io.hpp"
#include "qrs/validity.hpp"

using namespace qrs;

namespace {

ModelParams generic(double g, double j1 = 0.05, double j2 = 0.02, double Omega = 50.0) {
    return at_coupling(ModelParams::with_g(g, j1, j2, Omega), g);
}

double commutator_max(const OperatorMatrix& a, const OperatorMatrix& b) {
    const SparseMatrix sa = a.to_sparse(), sb = b.to_sparse();
    const SparseMatrix ab = sa * sb, ba = sb * sa;
    return max_abs_difference(ab, ba);
}

EigenOptions lanczos_only() {
    EigenOptions o;
    o.dense_limit = 0;
    return o;
}

EigenOptions dense_only() {
    EigenOptions o;
    o.dense_limit = std::numeric_limits<std::int64_t>::max();
    return o;
}

}  // namespace

TEST(FockSpace, IndexingIsBijective) {
    FockSpace f(3);
    EXPECT_EQ(f.dim(), 16 * 81);
    for (std::int64_t k = 0; k < f.dim(); ++k) ASSERT_EQ(f.index(f.decode(k)), k);
    // cavity-major, spin-minor: one photon in cavity 4 moves the index by 16
    BasisState b;
    b.n = {0, 0, 0, 1};
    EXPECT_EQ(f.index(b), 16);
    b = {};
    b.s = {1, 0, 0, 0};
    EXPECT_EQ(f.index(b), 8);
}

TEST(FockSpace, RejectsBadCutoffAndOversizedSpaces) {
    EXPECT_THROW(FockSpace(1), Error);
    try {
        FockSpace f(6, 10000);
        FAIL() << "expected DimensionOverflow";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::DimensionOverflow);
    }
}

TEST(Hamiltonian, DecoupledLimitIsDiagonal) {
    FockSpace f(3);
    ModelParams p{1.0, 50.0, 0.0, 0.0, 0.0};
    const auto h = build_hamiltonian(p, f);
    const DenseMatrix d = h.to_dense();
    for (std::int64_t k = 0; k < f.dim(); ++k) {
        const auto b = f.decode(k);
        double expect = 0.0;
        for (int i = 0; i < kSites; ++i) expect += b.n[i] + 25.0 * (2 * b.s[i] - 1);
        ASSERT_EQ(d(k, k).real(), expect);
    }
    EXPECT_EQ((d - DenseMatrix(d.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 0.0);
    const auto r = ground_state(h, 2);
    EXPECT_DOUBLE_EQ(r.values[0], -100.0);
    EXPECT_DOUBLE_EQ(r.values[1], -99.0);
}

TEST(Hamiltonian, HermitianIncludingDisplacedFrame) {
    FockSpace f(3);
    const auto p = generic(0.4);
    EXPECT_LT(hermiticity_defect(build_hamiltonian(p, f)), 1e-13);
    Displacements d;
    d.alpha = {cplx(0.3, 0.1), cplx(-0.2, 0.0), cplx(0.1, -0.4), cplx(0.0, 0.2)};
    EXPECT_LT(hermiticity_defect(build_hamiltonian(p, f, d)), 1e-13);
}

TEST(Symmetry, ParityValuesAndInvolution) {
    FockSpace f(3);
    const auto par = parity_operator(f);
    const SparseMatrix pm = par.to_sparse();
    EXPECT_EQ(pm.coeff(0, 0), cplx(1.0));
    BasisState one;
    one.n = {1, 0, 0, 0};
    const auto k = f.index(one);
    EXPECT_EQ(pm.coeff(k, k), cplx(-1.0));
    const SparseMatrix sq = pm * pm;
    SparseMatrix id(f.dim(), f.dim());
    id.setIdentity();
    EXPECT_EQ(max_abs_difference(sq, id), 0.0);
}

TEST(Symmetry, HamiltonianCommutesWithParityAndCyclicShift) {
    FockSpace f(3);
    for (auto [j1, j2] : {std::pair{0.05, 0.02}, std::pair{0.05, 0.07}, std::pair{-0.3, 0.2}}) {
        const auto h = build_hamiltonian(generic(0.45, j1, j2), f);
        EXPECT_LT(commutator_max(h, parity_operator(f)), 1e-13);
        EXPECT_LT(commutator_max(h, cyclic_shift_operator(f)), 1e-13);
    }
}

TEST(Symmetry, CyclicShiftDirectionAndOrder) {
    FockSpace f(3);
    const auto perm = cyclic_shift_permutation(f);
    BasisState b;
    b.n = {1, 0, 0, 0};
    BasisState expect;
    expect.n = {0, 0, 0, 1};
    EXPECT_EQ(f.decode(perm[static_cast<std::size_t>(f.index(b))]), expect);
    // C^4 = 1 as a permutation
    for (std::int64_t k = 0; k < f.dim(); ++k) {
        std::int64_t j = k;
        for (int i = 0; i < 4; ++i) j = perm[static_cast<std::size_t>(j)];
        ASSERT_EQ(j, k);
    }
    std::int64_t fixed = 0;
    for (std::int64_t k = 0; k < f.dim(); ++k) fixed += perm[static_cast<std::size_t>(k)] == k;
    EXPECT_LT(fixed, f.dim());
}

TEST(Displacement, ZeroIsIdentity) {
    FockSpace f(3);
    const auto d = displacement_operator(f, Displacements{});
    EXPECT_LT((d.op.to_dense() - DenseMatrix::Identity(f.dim(), f.dim())).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_FALSE(d.warning);
}

TEST(Displacement, MeanFieldOfDisplacedVacuumIsPlusAlpha) {
    // D(alpha) = exp(alpha^* a - alpha a^dagger) shifts a -> a + alpha, so
    // D^dagger|0> = D(-alpha)|0> is the coherent state |alpha>.
    const int nc = 24;
    const double alpha = 0.1;
    const DenseMatrix dd = single_mode_displacement(nc, -alpha);
    const Vector psi = dd.col(0);
    const Eigen::MatrixXd a = single_mode_annihilation(nc);
    const cplx mean = psi.dot(a.cast<cplx>() * psi);
    EXPECT_NEAR(mean.real(), alpha, 1e-8);
    EXPECT_NEAR(mean.imag(), 0.0, 1e-12);
    // coherent-state amplitudes exp(-|a|^2/2) a^n / sqrt(n!)
    EXPECT_NEAR(std::abs(psi(1)), std::exp(-0.5 * alpha * alpha) * alpha, 1e-10);
}

TEST(Displacement, SimilarityPreservesSpectrum) {
    FockSpace f(3);
    const auto h = build_hamiltonian(generic(0.3), f);
    Displacements a;
    a.alpha = {0.05, -0.05, 0.05, -0.05};
    const auto d = displacement_operator(f, a);
    EXPECT_LT(d.unitarity_loss, 1e-12);
    const DenseMatrix dm = d.op.to_dense();
    const DenseMatrix rotated = dm * h.to_dense() * dm.adjoint();
    const auto r0 = ground_state(h, 3);
    const auto r1 = ground_state(OperatorMatrix{DenseMatrix(0.5 * (rotated + rotated.adjoint())), true}, 3);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(r0.values[i], r1.values[i], 1e-9);
    // the analytically shifted Hamiltonian agrees up to truncation at the cutoff
    const auto r2 = ground_state(build_hamiltonian(generic(0.3), f, a), 1);
    EXPECT_NEAR(r0.values[0], r2.values[0], 1e-2);
}

TEST(Displacement, LargeAmplitudeRaisesTruncationWarning) {
    FockSpace f(3);
    Displacements a;
    a.alpha = {2.0, 0.0, 0.0, 0.0};
    EXPECT_TRUE(displacement_operator(f, a).warning);
}

TEST(Squeeze, ZeroIsIdentityAndUnitary) {
    FockSpace f(5);
    const auto id = momentum_squeeze_operator(f, MomentumBranch::zero(), 0.0);
    EXPECT_LT((id.op.to_dense() - DenseMatrix::Identity(f.dim(), f.dim())).cwiseAbs().maxCoeff(), 1e-15);
    for (auto q : MomentumBranch::all()) {
        const auto s = momentum_squeeze_operator(f, q, 0.2);
        EXPECT_LT(s.unitarity_loss, 1e-8) << q.name();
    }
}

TEST(Squeeze, UniformModePhotonNumberMatchesSingleModeSqueezing) {
    // exp[l (a0^dag^2 - a0^2)] is single-mode squeezing with r = 2 l: <n> = sinh^2(2 l)
    FockSpace f(5);
    const double lam = 0.05;
    const DenseMatrix s = photon_squeeze_product(f, {lam, 0.0, 0.0, 0.0});
    const Vector psi = s.col(0);
    double total = 0.0;
    for (std::int64_t k = 0; k < f.photon_dim(); ++k) {
        std::int64_t rest = k;
        int n = 0;
        for (int i = 0; i < kSites; ++i) {
            n += static_cast<int>(rest % f.n_c());
            rest /= f.n_c();
        }
        total += n * std::norm(psi(k));
    }
    EXPECT_NEAR(total, std::pow(std::sinh(2 * lam), 2), 1e-6);
}

TEST(GroundState, DiagonalMatrixReturnsSortedEntries) {
    Eigen::VectorXd diag(6);
    diag << 3.0, -1.0, 2.0, -4.0, 0.5, 2.0;
    OperatorMatrix m{DenseMatrix(diag.cast<cplx>().asDiagonal()), true};
    const auto r = ground_state(m, 3);
    EXPECT_EQ(r.values, (std::vector<double>{-4.0, -1.0, 0.5}));
}

TEST(GroundState, LanczosMatchesDenseIncludingDegeneracy) {
    FockSpace f(3);
    // at J1 = J2 = 0 the pi/2 and 3pi/2 excitations are degenerate with the others
    for (auto [j1, j2] : {std::pair{0.05, 0.02}, std::pair{0.0, 0.0}}) {
        const auto h = build_hamiltonian(generic(0.3, j1, j2), f);
        const auto dense = ground_state(h, 5, dense_only());
        const auto krylov = ground_state(h, 5, lanczos_only());
        EXPECT_EQ(dense.method, "dense");
        EXPECT_EQ(krylov.method, "lanczos");
        for (int i = 0; i < 5; ++i) {
            EXPECT_NEAR(dense.values[i], krylov.values[i], 1e-9);
            EXPECT_LT(krylov.residuals[i], 1e-9 * krylov.matrix_norm);
        }
    }
}

TEST(GroundState, LockedVectorStaysDeflatedOverLongKrylovRuns) {
    // displaced frame at n_c = 3: lowest excited pair split by ~1e-5, so the
    // second eigenpair needs hundreds of steps with the ground state locked
    FockSpace f(3);
    const double g = 0.6;
    const auto p = generic(g, 0.05, 0.07);
    const auto mf = meanfield_state(p, g, MomentumBranch::half_pi(), f, Frame::Displaced);
    const auto h = build_hamiltonian(p, f, mf.alpha);
    const auto dense = ground_state(h, 3, dense_only());
    const auto krylov = ground_state(h, 3, lanczos_only());
    EXPECT_LT(dense.values[2] - dense.values[1], 1e-4);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(dense.values[i], krylov.values[i], 1e-9);
}

TEST(GroundState, NoConvergenceCarriesDiagnostics) {
    FockSpace f(3);
    const auto h = build_hamiltonian(generic(0.3), f);
    EigenOptions o = lanczos_only();
    o.krylov_dim = 5;
    o.max_restarts = 1;
    try {
        ground_state(h, 1, o);
        FAIL() << "expected NoConvergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NoConvergence);
        EXPECT_NE(std::string(e.what()).find("mat-vecs"), std::string::npos);
    }
}

TEST(GroundState, NormalPhaseEnergyNearAnalytic) {
    FockSpace f(5);
    const auto p = generic(0.3);
    const auto r = ground_state(build_hamiltonian(p, f), 1);
    EXPECT_EQ(r.method, "lanczos");
    // finite Omega/omega = 50 and the cutoff leave a few 1e-3 omega
    EXPECT_NEAR(r.values[0], np_ground_energy(p, 0.3), 5e-3);
}

TEST(GroundState, TruncationConvergesAwayFromCriticalPoint) {
    const auto p = generic(0.3);
    const double e5 = ground_state(build_hamiltonian(p, FockSpace(5)), 1).values[0];
    const double e6 = ground_state(build_hamiltonian(p, FockSpace(6)), 1).values[0];
    EXPECT_LT(std::abs(e6 - e5) / std::abs(e6), 1e-6);
}

TEST(MeanFieldState, DecoupledLimitIsBareVacuum) {
    FockSpace f(3);
    const auto p = generic(0.0);
    const auto mf = meanfield_state(p, 0.0, std::nullopt, f);
    EXPECT_NEAR(std::abs(mf.state.amplitudes()(0)), 1.0, 1e-15);
    EXPECT_NEAR(mf.state.amplitudes().norm(), 1.0, 1e-12);
    const auto r = ground_state(build_hamiltonian(p, f), 1);
    EXPECT_NEAR(fidelity(mf.state.amplitudes(), {r.vectors[0]}), 1.0, 1e-12);
}

TEST(MeanFieldState, NormalisedInBothFramesAndRayleighBound) {
    FockSpace f(3);
    for (double g : {0.2, 0.4}) {
        const auto p = generic(g);
        const auto mf = meanfield_state(p, g, std::nullopt, f);
        EXPECT_NEAR(mf.state.amplitudes().norm(), 1.0, 1e-12);
        const auto h = build_hamiltonian(p, f);
        EXPECT_LE(ground_state(h, 1).values[0], expectation(h, mf.state.amplitudes()));
    }
    const double g = 0.6;
    const auto p = generic(g);
    const auto mf = meanfield_state(p, g, MomentumBranch::pi(), f, Frame::Displaced);
    EXPECT_NEAR(mf.state.amplitudes().norm(), 1.0, 1e-12);
    const auto h = build_hamiltonian(p, f, mf.alpha);
    EXPECT_LE(ground_state(h, 1).values[0], expectation(h, mf.state.amplitudes()));
    // qubits tilt toward -x on positive-amplitude sites: tan(2 gamma) = 4 lambda A / Omega
    EXPECT_NEAR(std::tan(2 * mf.gamma[0]), 4 * p.lambda * mf.alpha.real(0) / p.Omega, 1e-12);
}

TEST(Fidelity, SubspaceProjection) {
    Vector a = Vector::Zero(4), b = Vector::Zero(4), c = Vector::Zero(4);
    a(0) = 1;
    b(1) = 1;
    c(2) = 1;
    EXPECT_DOUBLE_EQ(fidelity(a, {a}), 1.0);
    EXPECT_DOUBLE_EQ(fidelity(a, {b, c}), 0.0);
    Vector mix = (a + b) / std::sqrt(2.0);
    EXPECT_NEAR(fidelity(mix, {a}), 0.5, 1e-15);
    EXPECT_NEAR(fidelity(mix, {a, b, mix}), 1.0, 1e-15);
    try {
        fidelity(a, std::vector<Vector>{});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::EmptySubspace);
    }
}

TEST(Fidelity, FrustratedSuperradiantPointInDisplacedFrame) {
    FockSpace f(5);
    const double g = 0.6;
    const auto p = generic(g, 0.05, 0.07);
    const auto q0 = dominant_branch(p).branch;
    const auto mf = meanfield_state(p, g, q0, f, Frame::Displaced);
    const auto r = ground_state(build_hamiltonian(p, f, mf.alpha), 2);
    EXPECT_GT(fidelity(mf.state.amplitudes(), r.vectors), 0.95);
    // broken symmetry: no near-degenerate partner inside one displaced frame
    EXPECT_GT(r.values[1] - r.values[0], 0.1 * p.omega);
}

TEST(Observables, VacuumAndNormalPhase) {
    FockSpace f(3);
    Vector vac = Vector::Zero(f.dim());
    vac(0) = 1.0;
    const auto o = observables(vac, f);
    for (int n = 0; n < kSites; ++n) {
        EXPECT_EQ(o.a[n], cplx{});
        EXPECT_EQ(o.n[n], 0.0);
        EXPECT_EQ(o.sz[n], -1.0);
    }
    const auto r = ground_state(build_hamiltonian(generic(0.3), f), 1);
    const auto np = observables(r.vectors[0], f);
    for (int n = 0; n < kSites; ++n) EXPECT_LT(std::abs(np.a[n]), 1e-6);
}

TEST(Observables, DisplacedFrameRecoversCondensateAmplitude) {
    FockSpace f(5);
    const double g = 0.6;
    const auto p = generic(g);
    const auto set = srp_displacements(p, g, MomentumBranch::pi());
    const auto r = ground_state(build_hamiltonian(p, f, set.solutions[0]), 1);
    const auto o = observables(r.vectors[0], f, set.solutions[0]);
    EXPECT_NEAR(o.magnitude(), 3.54768, 0.05 * 3.54768);
    EXPECT_EQ(o.as_displacements().pattern(1e-3), DisplacementPattern::Staggered);
}

TEST(StateIo, RoundTripAndHeader) {
    FockSpace f(2);
    Vector psi(f.dim());
    for (std::int64_t k = 0; k < f.dim(); ++k) psi(k) = cplx(0.5 * k, -1.0 / (k + 1));
    std::stringstream ss;
    write_state(ss, f, psi);
    const std::string bytes = ss.str();
    EXPECT_EQ(bytes.substr(0, 4), "QRS1");
    EXPECT_EQ(static_cast<unsigned char>(bytes[4]), 2u);  // n_c, little-endian
    EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 0u);  // dim 256 = 0x100
    EXPECT_EQ(static_cast<unsigned char>(bytes[9]), 1u);
    EXPECT_EQ(bytes.size(), 4u + 4 + 8 + 24 + 16 * 256);
    const auto d = read_dump(ss);
    EXPECT_EQ(d.n_c, 2);
    EXPECT_EQ(d.basis_tag, kBasisOrderTag);
    EXPECT_FALSE(d.is_operator);
    EXPECT_EQ((d.data.col(0) - psi).cwiseAbs().maxCoeff(), 0.0);

    std::stringstream so;
    const auto par = parity_operator(f);
    write_operator(so, f, par);
    const auto od = read_dump(so);
    EXPECT_TRUE(od.is_operator);
    EXPECT_EQ((od.data - par.to_dense()).cwiseAbs().maxCoeff(), 0.0);
}
