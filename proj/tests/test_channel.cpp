#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qcorr/channel.hpp"
#include "qcorr/errors.hpp"

using namespace qcorr;
using Catch::Approx;

namespace {

CommonEnvChannel benchmark_channel() {
    const LorentzianDos dos(0.8);
    return CommonEnvChannel::from_dos(dos, 2.0, 1.0);
}

std::vector<double> grid(double tau_max, int steps) {
    std::vector<double> taus(steps + 1);
    for (int i = 0; i <= steps; ++i) taus[i] = tau_max * i / steps;
    return taus;
}

} // namespace

TEST_CASE("channel matrix basics", "[channel]") {
    const CommonEnvChannel ch = benchmark_channel();

    SECTION("tau = 0 is the identity") {
        CHECK((ch.channel_matrix(0.0) - Eigen::Matrix3d::Identity())
                  .cwiseAbs()
                  .maxCoeff() < 1e-15);
        CHECK(std::abs(ch.coherence_factor_outer(0.0) - cplx(1.0)) < 1e-15);
        CHECK(std::abs(ch.coherence_factor_inner(0.0) - cplx(1.0)) < 1e-15);
    }
    SECTION("columns sum to 1 and entries stay in [0, 1]") {
        for (double tau : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0, 50.0}) {
            const Eigen::Matrix3d m = ch.channel_matrix(tau);
            for (int c = 0; c < 3; ++c)
                CHECK(m.col(c).sum() == Approx(1.0).margin(1e-13));
            CHECK(m.minCoeff() > -1e-13);
            CHECK(m.maxCoeff() < 1.0 + 1e-13);
        }
    }
    SECTION("negative time is rejected") {
        CHECK_THROWS_AS(ch.channel_matrix(-0.1), ValidationError);
        CHECK_THROWS_AS(ch.evolve(XState(), -1.0), ValidationError);
    }
}

TEST_CASE("trajectory invariants", "[channel]") {
    const CommonEnvChannel ch = benchmark_channel();
    std::mt19937_64 gen(31337);
    for (int i = 0; i < 20; ++i) {
        const XState rho0 = random_xstate(gen);
        const double a2_0 = rho0.block_coords().a2;
        for (double tau : {0.0, 0.3, 1.7, 6.0}) {
            const XState rho = ch.evolve(rho0, tau);
            const Mat4 m = rho.matrix();
            CHECK(std::abs(m.trace().real() - 1.0) < 1e-13);
            CHECK(x_violation(m) == 0.0);
            for (double ev : rho.eigenvalues()) CHECK(ev >= -1e-12);
            // the antisymmetric inner combination is conserved exactly
            CHECK(rho.block_coords().a2 == Approx(a2_0).margin(1e-14));
        }
    }
}

TEST_CASE("evolve agrees with the block composition", "[channel]") {
    const CommonEnvChannel ch = benchmark_channel();
    std::mt19937_64 gen(31338);
    for (int i = 0; i < 25; ++i) {
        const XState rho0 = random_xstate(gen);
        for (double tau : {0.05, 0.9, 4.2}) {
            const XState a = ch.evolve(rho0, tau);
            const XState b = ch.evolve_blockform(rho0, tau);
            CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("coherence factors carry the damped phases", "[channel]") {
    const CommonEnvChannel ch = benchmark_channel();
    const RateSet& r = ch.rate_set();
    for (double tau : {0.2, 1.0, 3.7}) {
        const cplx outer = ch.coherence_factor_outer(tau);
        const cplx inner = ch.coherence_factor_inner(tau);
        CHECK(std::abs(outer) == Approx(std::exp(-r.gamma_sum * tau)).margin(1e-13));
        CHECK(std::abs(inner) == Approx(std::exp(-r.gamma_sum * tau)).margin(1e-13));
        CHECK(std::arg(outer) ==
              Approx(std::remainder(r.psi_plus * tau, 2.0 * M_PI)).margin(1e-12));
        CHECK(std::arg(inner) ==
              Approx(std::remainder(r.psi_minus * tau, 2.0 * M_PI)).margin(1e-12));
    }
    // the factors multiply the initial coherences entrywise
    const XState rho0 = bell2_state(cplx(0.2));
    const XState rho = ch.evolve(rho0, 1.3);
    CHECK(std::abs(rho.r14() - ch.coherence_factor_outer(1.3) * rho0.r14()) <
          1e-14);
}

TEST_CASE("stationary state of the benchmark channel", "[channel]") {
    const CommonEnvChannel ch = benchmark_channel();
    const XState rho0 = bell2_state(cplx(0.2));
    const XState inf = ch.stationary(rho0);

    // frozen closed-form values for (gamma, E, s, alpha) = (0.8, 2, 1, 0.2)
    CHECK(inf.r11() == Approx(0.6873631914709798).margin(1e-12));
    const BlockCoords bc = inf.block_coords();
    CHECK(bc.a1 == Approx(0.22181411238263032).margin(1e-12));
    CHECK(inf.r44() == Approx(0.090822696146389881).margin(1e-12));
    CHECK(std::abs(bc.a3) < 1e-15);
    CHECK(std::abs(inf.r14()) < 1e-15);

    // a2 = 0 for this initial condition, so r22 = r33 = a1 / 2 and the
    // inner block is the rank-1 symmetric mixture
    CHECK(inf.r22() == Approx(bc.a1 / 2.0).margin(1e-14));
    CHECK(std::abs(inf.r23()) == Approx(bc.a1 / 2.0).margin(1e-14));

    // long-time propagation lands on the same state
    const XState late = ch.evolve(rho0, 300.0);
    CHECK((late.matrix() - inf.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    // and the limit matrix agrees with the propagator at large tau
    CHECK((ch.stationary_matrix() - ch.channel_matrix(200.0))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    for (int c = 0; c < 3; ++c)
        CHECK(ch.stationary_matrix().col(c).sum() == Approx(1.0).margin(1e-13));
}

TEST_CASE("stationary map keeps initial-condition memory", "[channel]") {
    // The structured-environment limit map is invertible: different initial
    // triples reach different stationary triples. Only the constant-rate
    // variant forgets everything but the conserved total.
    const CommonEnvChannel ch = benchmark_channel();
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(ch.stationary_matrix());
    CHECK(svd.singularValues()(2) > 1e-3);
    CHECK(ch.stationary_matrix().determinant() ==
          Approx(0.03214463389015221).margin(1e-12));

    const CommonEnvChannel flat =
        CommonEnvChannel::from_dos(FlatDos(0.1), 2.0, 1.0);
    Eigen::JacobiSVD<Eigen::Matrix3d> fsvd(flat.stationary_matrix());
    CHECK(fsvd.singularValues()(0) == Approx(1.0).margin(1e-12));
    CHECK(fsvd.singularValues()(1) < 1e-12);
}

TEST_CASE("constant-rate channel is an exact semigroup", "[channel]") {
    const FlatDos dos(0.1);
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(dos, 2.0, 1.0);
    const Eigen::Matrix3d gen3 = flat_generator(0.1);

    SECTION("generator spectrum and eigenvectors") {
        Eigen::EigenSolver<Eigen::Matrix3d> es(gen3);
        std::vector<double> evs;
        for (int k = 0; k < 3; ++k) evs.push_back(es.eigenvalues()(k).real());
        std::sort(evs.begin(), evs.end());
        CHECK(evs[0] == Approx(0.0).margin(1e-14));
        CHECK(evs[1] == Approx(0.2).margin(1e-13));
        CHECK(evs[2] == Approx(0.6).margin(1e-13));
        const Eigen::Vector3d e2(1.0, -2.0, 1.0);
        const Eigen::Vector3d e3(1.0, 0.0, -1.0);
        CHECK((gen3 * e2 - 0.6 * e2).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((gen3 * e3 - 0.2 * e3).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((gen3 * Eigen::Vector3d::Ones()).cwiseAbs().maxCoeff() < 1e-14);
    }
    SECTION("channel matrix equals the exponential") {
        for (double tau : {0.3, 1.1, 4.0}) {
            const Eigen::Matrix3d expm = (-tau * gen3).exp();
            CHECK((ch.channel_matrix(tau) - expm).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
    SECTION("semigroup composition closes") {
        const Eigen::Matrix3d lhs = ch.channel_matrix(0.7 + 1.9);
        const Eigen::Matrix3d rhs =
            ch.channel_matrix(0.7) * ch.channel_matrix(1.9);
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
    SECTION("diagnostic flags the markovian case") {
        const MarkovDiagnostic d = ch.markov_diagnostic();
        CHECK(d.is_flat);
        CHECK(d.det_phi3_inf == Approx(0.0).margin(1e-12));
        CHECK(d.max_semigroup_residual < 1e-10);
        // total mixing: every input relaxes to the uniform population vector
        const Eigen::Matrix3d s = ch.stationary_matrix();
        for (int c = 0; c < 3; ++c)
            for (int rr = 0; rr < 3; ++rr)
                CHECK(s(rr, c) == Approx(1.0 / 3.0).margin(1e-12));
    }
}

TEST_CASE("structured environment breaks the semigroup", "[channel]") {
    const MarkovDiagnostic d = benchmark_channel().markov_diagnostic();
    CHECK_FALSE(d.is_flat);
    CHECK(d.max_semigroup_residual > 0.1);
    CHECK(d.det_phi3_inf == Approx(0.03214463389015221).margin(1e-12));
}

TEST_CASE("flat stationary state is separable but discordant", "[channel]") {
    const FlatDos dos(0.1);
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(dos, 2.0, 1.0);
    const XState inf = ch.stationary(bell2_state(cplx(0.2)));
    CHECK(inf.r11() == Approx(1.0 / 3.0).margin(1e-12));
    CHECK(inf.r22() == Approx(1.0 / 6.0).margin(1e-12));
    CHECK(inf.r23().real() == Approx(1.0 / 6.0).margin(1e-12));
    const QuantifierReport r = report(inf);
    CHECK(r.negativity == 0.0);
    CHECK(r.concurrence == 0.0);
    CHECK(r.discord == Approx(1.0 / 3.0).margin(1e-4));
}

TEST_CASE("death and revival sequence", "[channel]") {
    // (gamma, E) = (0.33, 1.5) with the outer Bell state at alpha = 0.67:
    // death, then revival, then a positive trapped plateau.
    const LorentzianDos dos(0.33);
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(dos, 1.5, 1.0);
    const XState rho0 = bell2_state(cplx(0.67));
    const Trajectory tr = trajectory(ch, rho0, grid(40.0, 400));

    REQUIRE(tr.events.size() >= 2);
    CHECK(tr.events[0].death);
    CHECK_FALSE(tr.events[1].death);
    CHECK(tr.events[0].tau < tr.events[1].tau);
    CHECK(tr.events[0].tau > 0.0);

    // concurrence at the recorded death point is zero to event resolution
    const XState at_death = ch.evolve(rho0, tr.events[0].tau);
    CHECK(concurrence(at_death) < 1e-3);

    // the revived branch survives to the stationary state
    const double c_inf = concurrence(ch.stationary(rho0));
    CHECK(c_inf == Approx(0.0488).margin(5e-3));
    CHECK(c_inf > 0.0);

    // reports line up with the state sequence
    REQUIRE(tr.states.size() == tr.taus.size());
    REQUIRE(tr.reports.size() == tr.taus.size());
    const std::size_t mid = tr.taus.size() / 2;
    CHECK(tr.reports[mid].concurrence ==
          Approx(concurrence(tr.states[mid])).margin(1e-14));
}

TEST_CASE("single sudden death without revival", "[channel]") {
    // (gamma, E) = (0.15, 1.1), same initial state: one death event and a
    // separable stationary state.
    const LorentzianDos dos(0.15);
    const CommonEnvChannel ch = CommonEnvChannel::from_dos(dos, 1.1, 1.0);
    const XState rho0 = bell2_state(cplx(0.67));
    const Trajectory tr = trajectory(ch, rho0, grid(60.0, 600));

    REQUIRE(tr.events.size() == 1);
    CHECK(tr.events[0].death);
    CHECK(concurrence(ch.stationary(rho0)) == 0.0);
}
