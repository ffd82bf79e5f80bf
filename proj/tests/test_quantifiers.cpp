#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qcorr/errors.hpp"
#include "qcorr/quantifiers.hpp"
#include "qcorr/xstate.hpp"

using namespace qcorr;
using Catch::Approx;

namespace {

double h2(double p) {
    if (p <= 0.0 || p >= 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Entanglement entropy of the reduced state. For any pure two-qubit state
// every correlation measure coincides with it: concurrence and negativity
// equal 2 a b (Schmidt coefficients a, b), discord equals h2(a^2).
double reduced_entropy(const Mat4& rho) {
    Eigen::Matrix2cd ra = Eigen::Matrix2cd::Zero();
    for (int a = 0; a < 2; ++a)
        for (int ap = 0; ap < 2; ++ap)
            for (int b = 0; b < 2; ++b) ra(a, ap) += rho(2 * a + b, 2 * ap + b);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(ra);
    double s = 0.0;
    for (int k = 0; k < 2; ++k) {
        const double p = es.eigenvalues()(k);
        if (p > 1e-15) s -= p * std::log2(p);
    }
    return s;
}

} // namespace

TEST_CASE("pure-state quantifiers against the Schmidt form", "[quantifiers]") {
    // For |psi> = alpha|+-> + beta|-+>: C = N = 2|alpha||beta|, D = h2(|alpha|^2).
    struct Row {
        double alpha;
        double c;
        double d;
    };
    const Row rows[] = {
        {std::sqrt(0.5), 1.0, 1.0},
        {0.5, std::sqrt(3.0) / 2.0, h2(0.25)},
        {0.2, 2.0 * 0.2 * std::sqrt(0.96), h2(0.04)},
        {0.9, 2.0 * 0.9 * std::sqrt(0.19), h2(0.81)},
    };
    for (const Row& row : rows) {
        const XState st = bell1_state(cplx(row.alpha));
        CHECK(concurrence(st) == Approx(row.c).margin(1e-12));
        CHECK(negativity(st) == Approx(row.c).margin(1e-12));
        CHECK(entropy(st) == Approx(0.0).margin(1e-12));
        CHECK(discord(st) == Approx(row.d).margin(1e-4));
        CHECK(discord(st) == Approx(reduced_entropy(st.matrix())).margin(1e-4));
    }
    // outer-pair Bell family gives the same values through the other branch
    const XState st = bell2_state(cplx(0.2));
    CHECK(concurrence(st) == Approx(2.0 * 0.2 * std::sqrt(0.96)).margin(1e-12));
    CHECK(negativity(st) == Approx(concurrence(st)).margin(1e-12));
    CHECK(discord(st) == Approx(h2(0.04)).margin(1e-4));
}

TEST_CASE("frozen benchmark values", "[quantifiers]") {
    {
        const QuantifierReport r = report(bell2_state(cplx(0.2)));
        CHECK(r.negativity == Approx(0.391918358845308).margin(1e-12));
        CHECK(r.concurrence == Approx(0.391918358845308).margin(1e-12));
        CHECK(r.discord == Approx(0.242292).margin(1e-5));
        CHECK(r.entropy == Approx(0.0).margin(1e-12));
    }
    {
        const QuantifierReport r = report(bell1_state(cplx(0.5)));
        CHECK(r.concurrence == Approx(0.866025403784439).margin(1e-12));
        CHECK(r.discord == Approx(0.811278).margin(1e-5));
    }
    {
        // separable but discordant stationary profile
        const XState st(1.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 3.0, cplx(0.0),
                        cplx(1.0 / 6.0));
        CHECK(negativity(st) == 0.0);
        CHECK(concurrence(st) == 0.0);
        CHECK(discord(st) == Approx(1.0 / 3.0).margin(1e-5));
    }
}

TEST_CASE("negativity and concurrence vanish together", "[quantifiers]") {
    std::mt19937_64 gen(90210);
    int entangled = 0;
    for (int i = 0; i < 400; ++i) {
        const XState st = random_xstate(gen);
        const double n = negativity(st);
        const double c = concurrence(st);
        CHECK((n > 0.0) == (c > 0.0));
        CHECK(n <= c + 1e-12);  // negativity never exceeds concurrence
        if (c > 0.0) ++entangled;
    }
    CHECK(entangled > 50);  // the sample must exercise both branches
}

TEST_CASE("entropy closed form equals the dense eigensolver", "[quantifiers]") {
    std::mt19937_64 gen(90211);
    for (int i = 0; i < 500; ++i) {
        const XState st = random_xstate(gen);
        CHECK(entropy(st) == Approx(entropy_of_matrix(st.matrix())).margin(1e-12));
    }
    CHECK(entropy(XState()) == Approx(2.0).margin(1e-14));
    Mat4 bad = Mat4::Identity() * 0.3;
    bad(3, 3) = 0.1 + 1e-6;
    bad(0, 0) = 0.3 - 1e-6;  // trace 1, fine
    CHECK_NOTHROW(entropy_of_matrix(bad));
    bad(3, 3) = -1e-6;
    CHECK_THROWS_AS(entropy_of_matrix(bad), ValidationError);
}

TEST_CASE("noisy Bell mixture entanglement threshold", "[quantifiers]") {
    // alpha |psi><psi| + (1 - alpha) I/4 is entangled iff alpha > 1/3
    CHECK(concurrence(werner_state(1, 1.0 / 3.0)) == Approx(0.0).margin(1e-12));
    CHECK(concurrence(werner_state(1, 1.0 / 3.0 + 1e-3)) > 0.0);
    CHECK(concurrence(werner_state(1, 1.0 / 3.0 - 1e-3)) == 0.0);
    CHECK(concurrence(werner_state(1, 1.0)) == Approx(1.0).margin(1e-12));
    // closed form C = max{0, (3 alpha - 1)/2}
    CHECK(concurrence(werner_state(2, 0.7)) == Approx(0.55).margin(1e-12));
    CHECK(negativity(werner_state(2, 0.7)) == Approx(0.55).margin(1e-12));
    // discordant below the threshold
    CHECK(discord(werner_state(1, 0.2)) > 0.01);
}

TEST_CASE("reduced-angle discord matches the two-angle search", "[quantifiers]") {
    std::mt19937_64 gen(777);
    DiscordOptions opt;
    for (int i = 0; i < 30; ++i) {
        const XState st = random_xstate(gen);
        const DiscordDetail fast = discord_detail(st, opt);
        const DiscordDetail full = discord_of_matrix(st.matrix(), opt);
        CHECK(fast.value == Approx(full.value).margin(1e-5));
        CHECK(fast.conditional_entropy ==
              Approx(full.conditional_entropy).margin(1e-5));
    }
}

TEST_CASE("discord basics", "[quantifiers]") {
    CHECK(discord(XState()) == 0.0);
    // the dephased product family is entirely classical
    CHECK(discord(product_state(0.6)) == Approx(0.0).margin(1e-9));
    const XState cc(0.5, 0.0, 0.0, 0.5, cplx(0.0), cplx(0.0));
    CHECK(discord(cc) == Approx(0.0).margin(1e-9));
    // discord is nonnegative after the documented clipping
    std::mt19937_64 gen(778);
    for (int i = 0; i < 100; ++i) CHECK(discord(random_xstate(gen)) >= 0.0);
}

TEST_CASE("measured-side asymmetry", "[quantifiers]") {
    DiscordOptions opt_b;
    DiscordOptions opt_a;
    opt_a.side = MeasuredSide::a;
    // symmetric states agree on both sides
    const XState sym = werner_state(1, 0.7);
    CHECK(discord_detail(sym, opt_a).value ==
          Approx(discord_detail(sym, opt_b).value).margin(1e-5));
    // pure states agree as well (both reduce to the entanglement entropy)
    const XState pure = bell1_state(cplx(0.4));
    CHECK(discord_detail(pure, opt_a).value ==
          Approx(discord_detail(pure, opt_b).value).margin(1e-4));
}

TEST_CASE("report bundles the individual quantifiers", "[quantifiers]") {
    std::mt19937_64 gen(779);
    const XState st = random_xstate(gen);
    const QuantifierReport r = report(st);
    CHECK(r.negativity == negativity(st));
    CHECK(r.concurrence == concurrence(st));
    CHECK(r.entropy == entropy(st));
    CHECK(r.discord == discord(st));
}
