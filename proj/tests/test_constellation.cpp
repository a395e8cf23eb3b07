#include "ampcon/constellation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "ampcon/rng.hpp"

using namespace ampcon;

namespace {

// Independent pairwise minimum, kept deliberately naive.
double naive_dmin(const Eigen::VectorXcd& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts.size(); ++i)
        for (Eigen::Index j = 0; j < pts.size(); ++j)
            if (i != j) best = std::min(best, std::abs(pts[i] - pts[j]));
    return best;
}

// Model minimum distance implied by the innermost-ring convention.
double model_dmin(const ApskParams& p) {
    const auto& n = p.rings.points_per_ring;
    if (n[0] >= 2) return intra_ring_dmin(p.radii[0], n[0]);
    return std::min(intra_ring_dmin(p.radii[1], n[1]), p.radii[1]);
}

}  // namespace

TEST_CASE("intra-ring distance") {
    CHECK(intra_ring_dmin(1.0, 4) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(intra_ring_dmin(1.0, 16) == doctest::Approx(0.3902).epsilon(1e-4));
    CHECK(intra_ring_dmin(0.4603, 5) == doctest::Approx(0.5411).epsilon(1e-4));
    CHECK_THROWS_AS(intra_ring_dmin(1.0, 1), std::invalid_argument);

    // cross-check the closed form against points placed on the ring
    Eigen::VectorXcd ring(5);
    for (int k = 0; k < 5; ++k) ring[k] = std::polar(0.4603, 2.0 * M_PI * k / 5);
    CHECK(intra_ring_dmin(0.4603, 5) == doctest::Approx(naive_dmin(ring)).epsilon(1e-12));
}

TEST_CASE("minimum inter-ring phase by exact scan") {
    CHECK(min_inter_ring_phase(8, 8, 0.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(min_inter_ring_phase(8, 8, M_PI / 8) == doctest::Approx(M_PI / 8).epsilon(1e-12));
    CHECK(min_inter_ring_phase(5, 11, M_PI / 55) == doctest::Approx(M_PI / 55).epsilon(1e-12));
}

TEST_CASE("optimal phase shift closed form") {
    auto s88 = optimal_phase_shift(8, 8);
    CHECK(s88.delta_omega == doctest::Approx(M_PI / 8).epsilon(1e-14));
    CHECK(s88.phi == doctest::Approx(M_PI / 8).epsilon(1e-14));

    auto s511 = optimal_phase_shift(5, 11);
    CHECK(s511.delta_omega == doctest::Approx(M_PI / 55).epsilon(1e-14));
    CHECK(s511.delta_omega == doctest::Approx(0.0571).epsilon(1e-3));

    auto s613 = optimal_phase_shift(6, 13);
    CHECK(s613.delta_omega == doctest::Approx(M_PI / 78).epsilon(1e-14));
    CHECK(s613.phi == doctest::Approx(0.04027).epsilon(1e-4));

    // sweep oracle: no offset beats the closed form, which is attained
    for (auto [nl, nn] : {std::pair{6, 13}, {5, 11}, {4, 4}, {1, 7}, {3, 8}}) {
        const auto opt = optimal_phase_shift(nl, nn);
        const double period = 2.0 * opt.delta_omega;
        for (int s = 0; s < 400; ++s) {
            const double dw = period * s / 400;
            CHECK(min_inter_ring_phase(nl, nn, dw) <= opt.phi + 1e-6);
        }
        CHECK(min_inter_ring_phase(nl, nn, opt.delta_omega) == doctest::Approx(opt.phi).epsilon(1e-9));
    }
}

TEST_CASE("next ring radius bounds") {
    const double d16 = 2.0 * std::sin(M_PI / 5);  // inner-ring chord target
    CHECK(next_ring_radius(1.0, 11, M_PI / 55, d16) == doctest::Approx(2.17255).epsilon(1e-5));
    CHECK(1.0 / next_ring_radius(1.0, 11, M_PI / 55, d16) == doctest::Approx(0.4603).epsilon(1e-4));

    // center-point case: the inter-ring bound reduces to the target itself
    CHECK(next_ring_radius(0.0, 7, 0.3, 1.0) == doctest::Approx(1.0 / (2.0 * std::sin(M_PI / 7))).epsilon(1e-12));

    // both bounds evaluated by hand; the inter-ring root must satisfy
    // r^2 + 1 - 2 r cos(pi/4) = 2 exactly
    const double r = next_ring_radius(1.0, 4, M_PI / 4, std::sqrt(2.0));
    CHECK(r == doctest::Approx(std::cos(M_PI / 4) + std::sqrt(1.5)).epsilon(1e-12));
    CHECK(r * r + 1.0 - 2.0 * r * std::cos(M_PI / 4) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS(next_ring_radius(1.0, 8, M_PI / 8, 0.01), infeasible_error);
    CHECK_THROWS_AS(next_ring_radius(1.0, 1, M_PI / 8, 1.0), std::invalid_argument);
}

TEST_CASE("recursive construction reproduces the reference designs") {
    SUBCASE("two rings with center point") {
        const auto p = construct_apsk(RingSpec{{1, 7}}, 1.0);
        CHECK(p.radii[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.radii[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.phases[1] == doctest::Approx(0.4488).epsilon(1e-4));
    }
    SUBCASE("two rings") {
        const auto p = construct_apsk(RingSpec{{5, 11}}, 1.0);
        CHECK(p.radii[0] == doctest::Approx(0.4603).epsilon(1e-4));
        CHECK(p.radii[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.phases[0] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(p.phases[1] == doctest::Approx(0.0571).epsilon(1e-3));
    }
    SUBCASE("three rings") {
        const auto p = construct_apsk(RingSpec{{5, 10, 17}}, 1.0);
        CHECK(p.radii[0] == doctest::Approx(0.3068).epsilon(1e-3));
        CHECK(p.radii[1] == doctest::Approx(0.6397).epsilon(1e-3));
        CHECK(p.radii[2] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.phases[1] == doctest::Approx(0.3142).epsilon(1e-3));
        CHECK(p.phases[2] == doctest::Approx(0.3326).epsilon(1e-3));
    }
    SUBCASE("five rings") {
        const auto p = construct_apsk(RingSpec{{1, 6, 13, 19, 25}}, 1.0);
        const double want_r[] = {0.0, 0.2446, 0.5110, 0.7555, 1.0};
        const double want_w[] = {0.0, 0.5236, 0.5639, 0.5766, 0.5832};
        for (int l = 0; l < 5; ++l) {
            CHECK(p.radii[l] == doctest::Approx(want_r[l]).epsilon(1e-3));
            CHECK(p.phases[l] == doctest::Approx(want_w[l]).epsilon(1e-3));
        }
    }
}

TEST_CASE("scaling covariance") {
    const auto unit = construct_apsk(RingSpec{{5, 11}}, 1.0);
    const auto big = construct_apsk(RingSpec{{5, 11}}, 2.5);
    for (int l = 0; l < 2; ++l) CHECK(big.radii[l] == doctest::Approx(2.5 * unit.radii[l]).epsilon(1e-12));
    const double d1 = brute_force_dmin(realize(unit)).d_min;
    const double d2 = brute_force_dmin(realize(big)).d_min;
    CHECK(d2 == doctest::Approx(2.5 * d1).epsilon(1e-12));
}

TEST_CASE("rotational invariance of the distance report") {
    auto p = construct_apsk(RingSpec{{5, 11}}, 1.0);
    const auto base = brute_force_dmin(realize(p));
    for (auto& w : p.phases) w += 0.7331;
    const auto rotated = brute_force_dmin(realize(p));
    CHECK(rotated.d_min == doctest::Approx(base.d_min).epsilon(1e-12));
    CHECK(rotated.inter_adjacent[0] == doctest::Approx(base.inter_adjacent[0]).epsilon(1e-12));
}

TEST_CASE("canonical phase reduction keeps the point set") {
    auto p = construct_apsk(RingSpec{{1, 6, 13, 19, 25}}, 1.0);
    auto reduced = p;
    for (int l = 0; l < 5; ++l) {
        reduced.phases[l] = reduce_phase(p.phases[l], p.rings.points_per_ring[l]);
        CHECK(reduced.phases[l] >= 0.0);
        CHECK(reduced.phases[l] < 2.0 * M_PI / p.rings.points_per_ring[l]);
    }
    auto key = [](std::complex<double> z) { return std::make_pair(std::round(z.real() * 1e9), std::round(z.imag() * 1e9)); };
    auto sorted_points = [&](const ApskParams& q) {
        const auto c = realize(q);
        std::vector<std::pair<double, double>> v;
        for (Eigen::Index i = 0; i < c.points.size(); ++i) v.push_back(key(c.points[i]));
        std::sort(v.begin(), v.end());
        return v;
    };
    CHECK(sorted_points(p) == sorted_points(reduced));
}

TEST_CASE("brute force distance oracle") {
    Constellation quad;
    quad.points.resize(4);
    quad.points << std::complex<double>(1, 0), std::complex<double>(-1, 0), std::complex<double>(0, 1),
        std::complex<double>(0, -1);
    CHECK(brute_force_dmin(quad).d_min == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

    const auto apsk8 = realize(construct_apsk(RingSpec{{1, 7}}, 1.0));
    CHECK(brute_force_dmin(apsk8).d_min == doctest::Approx(0.8678).epsilon(1e-4));

    Rng rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        Constellation c;
        c.points.resize(16);
        for (int i = 0; i < 16; ++i) c.points[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        CHECK(brute_force_dmin(c).d_min == doctest::Approx(naive_dmin(c.points)).epsilon(1e-12));
    }
}

TEST_CASE("search scores candidates by realized distance, never the model value") {
    // Dropping the non-adjacent inter-ring constraints means some candidates
    // realize less than their model distance (aligned far rings); scoring by
    // the brute-force value keeps them from winning on inflated numbers.
    for (int m : {8, 16, 32}) {
        double best_realized = 0.0;
        bool some_candidate_below_model = false;
        for (const auto& sizes : enumerate_ring_partitions(m, 6, true)) {
            ApskParams p;
            try {
                p = construct_apsk(RingSpec{sizes}, 1.0);
            } catch (const infeasible_error&) {
                continue;
            }
            const double realized = brute_force_dmin(realize(p)).d_min;
            best_realized = std::max(best_realized, realized);
            if (realized < model_dmin(p) - 1e-9) some_candidate_below_model = true;
        }
        const auto winner = design_best_apsk(m, 1.0);
        CHECK(winner.report.d_min == doctest::Approx(best_realized).epsilon(1e-12));
        // the winning design itself always meets its model distance
        CHECK(winner.report.d_min >= model_dmin(winner.params) - 1e-9);
        if (m == 32) CHECK(some_candidate_below_model);  // the relaxation does bite
    }
}

TEST_CASE("exhaustive design search") {
    SUBCASE("M=16") {
        const auto best = design_best_apsk(16, 1.0);
        CHECK(best.params.rings.points_per_ring == std::vector<int>{5, 11});
        CHECK(best.report.d_min == doctest::Approx(0.5411).epsilon(1e-4));
    }
    SUBCASE("M=8") {
        const auto best = design_best_apsk(8, 1.0);
        CHECK(best.params.rings.points_per_ring == std::vector<int>{1, 7});
        CHECK(best.report.d_min == doctest::Approx(0.8678).epsilon(1e-4));
    }
    SUBCASE("M=4 degenerates to the single QPSK ring") {
        const auto best = design_best_apsk(4, 1.0);
        CHECK(best.params.rings.points_per_ring == std::vector<int>{4});
        CHECK(best.report.d_min == doctest::Approx(std::sqrt(2.0)).epsilon(1e-9));
    }
    SUBCASE("search prunes change nothing") {
        for (int m : {8, 16, 32, 64}) {
            const auto pruned = design_best_apsk(m, 1.0);
            double best_unpruned = 0.0;
            for (const auto& sizes : enumerate_ring_partitions(m, 6, false)) {
                try {
                    const auto p = construct_apsk(RingSpec{sizes}, 1.0);
                    best_unpruned = std::max(best_unpruned, brute_force_dmin(realize(p)).d_min);
                } catch (const infeasible_error&) {
                }
            }
            CHECK(pruned.report.d_min == doctest::Approx(best_unpruned).epsilon(1e-12));
        }
    }
}

TEST_CASE("baseline constellations") {
    const auto qam16a = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
    CHECK(brute_force_dmin(qam16a).d_min == doctest::Approx(2.0 / std::sqrt(18.0)).epsilon(1e-12));
    CHECK(qam16a.peak_amplitude() == doctest::Approx(1.0).epsilon(1e-12));

    const auto psk32 = baseline_constellation(BaselineKind::Psk, 32, ScaleConstraint::Amplitude, 1.0);
    CHECK(brute_force_dmin(psk32).d_min == doctest::Approx(0.1960).epsilon(1e-4));

    const auto qam32p = baseline_constellation(BaselineKind::Qam, 32, ScaleConstraint::Power, 1.0);
    CHECK(brute_force_dmin(qam32p).d_min == doctest::Approx(0.4472).epsilon(1e-4));
    CHECK(qam32p.mean_energy() == doctest::Approx(1.0).epsilon(1e-12));

    const auto qam8 = baseline_constellation(BaselineKind::Qam, 8, ScaleConstraint::Amplitude, 1.0);
    CHECK(brute_force_dmin(qam8).d_min == doctest::Approx(0.6325).epsilon(1e-4));

    CHECK_THROWS_AS(baseline_constellation(BaselineKind::Qam, 128, ScaleConstraint::Amplitude, 1.0),
                    std::invalid_argument);
}

TEST_CASE("power rescaling") {
    const auto apsk16 = realize(construct_apsk(RingSpec{{5, 11}}, 1.0));
    const auto scaled = rescale_to_power(apsk16, 1.0);
    CHECK(scaled.mean_energy() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(brute_force_dmin(scaled).d_min == doctest::Approx(0.6233).epsilon(1e-3));
}

TEST_CASE("amplitude-constrained design dominates both baselines") {
    for (int m : {8, 16, 32, 64}) {
        const double apsk = design_best_apsk(m, 1.0).report.d_min;
        const double psk = brute_force_dmin(baseline_constellation(BaselineKind::Psk, m, ScaleConstraint::Amplitude, 1.0)).d_min;
        const double qam = brute_force_dmin(baseline_constellation(BaselineKind::Qam, m, ScaleConstraint::Amplitude, 1.0)).d_min;
        CHECK(apsk > psk);
        CHECK(apsk > qam);
    }
}

TEST_CASE("bit labels") {
    SUBCASE("QPSK Gray walk") {
        const auto qpsk = baseline_constellation(BaselineKind::Psk, 4, ScaleConstraint::Amplitude, 1.0);
        CHECK(qpsk.bit_map == std::vector<std::uint32_t>{0, 1, 3, 2});
    }
    SUBCASE("square QAM is product-Gray") {
        const auto qam = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
        const double dmin = brute_force_dmin(qam).d_min;
        for (int i = 0; i < 16; ++i) {
            for (int j = i + 1; j < 16; ++j) {
                if (std::abs(qam.points[i] - qam.points[j]) > dmin * 1.001) continue;
                CHECK(std::popcount(qam.bit_map[i] ^ qam.bit_map[j]) == 1);
            }
        }
    }
    SUBCASE("labels are a bijection") {
        for (int m : {8, 16, 32, 64}) {
            auto c = assign_bit_labels(realize(design_best_apsk(m, 1.0).params));
            auto sorted = c.bit_map;
            std::sort(sorted.begin(), sorted.end());
            for (int i = 0; i < m; ++i) CHECK(sorted[i] == static_cast<std::uint32_t>(i));
        }
    }
    SUBCASE("greedy labeling beats random relabeling on nearest neighbors") {
        auto c = assign_bit_labels(realize(construct_apsk(RingSpec{{5, 11}}, 1.0)));
        const double cutoff = 1.25 * brute_force_dmin(c).d_min;
        std::vector<std::pair<int, int>> pairs;
        for (int i = 0; i < 16; ++i)
            for (int j = i + 1; j < 16; ++j)
                if (std::abs(c.points[i] - c.points[j]) <= cutoff) pairs.emplace_back(i, j);
        auto mean_ham = [&](const std::vector<std::uint32_t>& lab) {
            double s = 0;
            for (auto [i, j] : pairs) s += std::popcount(lab[i] ^ lab[j]);
            return s / pairs.size();
        };
        const double ours = mean_ham(c.bit_map);
        double random_total = 0.0;
        Rng rng(7);
        std::vector<std::uint32_t> lab(16);
        for (int t = 0; t < 100; ++t) {
            for (int i = 0; i < 16; ++i) lab[i] = i;
            for (int i = 15; i > 0; --i) std::swap(lab[i], lab[rng.below(i + 1)]);
            random_total += mean_ham(lab);
        }
        CHECK(ours <= random_total / 100.0);
    }
}
