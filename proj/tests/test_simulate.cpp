#include "ampcon/simulate.hpp"

#include <doctest.h>

#include <cmath>

using namespace ampcon;

namespace {

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double binom_sigma(double p, double n) { return std::sqrt(std::max(p * (1.0 - p), 1e-300) / n); }

Constellation rotated(Constellation c, double theta) {
    const std::complex<double> r = std::polar(1.0, theta);
    c.points *= r;
    if (c.params)
        for (auto& w : c.params->phases) w += theta;
    return c;
}

}  // namespace

TEST_CASE("QPSK matches the closed form within binomial error") {
    const auto qpsk = baseline_constellation(BaselineKind::Psk, 4, ScaleConstraint::Amplitude, 1.0);
    AwgnConfig cfg;
    cfg.ebn0_db = {2.0, 4.0, 6.0};
    cfg.min_errors = 1000000;  // never stop early, use every symbol
    cfg.max_symbols = 400000;
    cfg.seed = 2024;
    const auto curve = awgn_ber(qpsk, cfg);
    REQUIRE(curve.points.size() == 3);
    for (const auto& p : curve.points) {
        const double gamma = std::pow(10.0, p.ebn0_db / 10.0);
        const double expect = qfunc(std::sqrt(2.0 * gamma));
        const double sigma = binom_sigma(expect, static_cast<double>(p.symbols) * 2);
        CHECK(std::abs(p.ber - expect) <= 3.0 * sigma);
    }
}

TEST_CASE("noise off means no errors") {
    const auto qam = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
    AwgnConfig cfg;
    cfg.ebn0_db = {std::numeric_limits<double>::infinity()};
    cfg.max_symbols = 20000;
    const auto curve = awgn_ber(qam, cfg);
    CHECK(curve.points[0].errors == 0);
    CHECK(curve.points[0].ber == 0.0);
    CHECK(curve.points[0].symbols == 20000);  // min_errors never reached
}

TEST_CASE("same seed, same curve; zero symbols, empty curve") {
    const auto qam = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
    AwgnConfig cfg;
    cfg.ebn0_db = {8.0, 10.0};
    cfg.max_symbols = 50000;
    cfg.min_errors = 100;
    cfg.seed = 7;
    const auto a = awgn_ber(qam, cfg);
    const auto b = awgn_ber(qam, cfg);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].errors == b.points[i].errors);
        CHECK(a.points[i].symbols == b.points[i].symbols);
        CHECK(a.points[i].ber == b.points[i].ber);
    }

    AwgnConfig vac = cfg;
    vac.max_symbols = 0;
    CHECK(awgn_ber(qam, vac).points.empty());
}

TEST_CASE("thread count does not change the result") {
    const auto qam = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
    AwgnConfig cfg;
    cfg.ebn0_db = {9.0};
    cfg.max_symbols = 120000;
    cfg.min_errors = 50;
    cfg.seed = 3;
    auto par = cfg;
    par.threads = 4;
    const auto a = awgn_ber(qam, cfg);
    const auto b = awgn_ber(qam, par);
    CHECK(a.points[0].errors == b.points[0].errors);
    CHECK(a.points[0].symbols == b.points[0].symbols);
}

TEST_CASE("PSK error events are invariant under global rotation") {
    const auto psk = baseline_constellation(BaselineKind::Psk, 8, ScaleConstraint::Amplitude, 1.0);
    AwgnConfig cfg;
    cfg.ebn0_db = {6.0};
    cfg.max_symbols = 100000;
    cfg.min_errors = 1000000;
    cfg.seed = 55;
    const auto base = awgn_ber(psk, cfg);
    const auto rot = awgn_ber(rotated(psk, 0.731), cfg);
    CHECK(base.points[0].errors == rot.points[0].errors);
    CHECK(base.points[0].symbols == rot.points[0].symbols);
}

TEST_CASE("BER is monotone in Eb/N0 within binomial confidence") {
    const auto apsk = assign_bit_labels(realize(design_best_apsk(16, 1.0).params));
    AwgnConfig cfg;
    cfg.ebn0_db = {4, 6, 8, 10, 12};
    cfg.max_symbols = 100000;
    cfg.min_errors = 200;
    cfg.seed = 13;
    const auto curve = awgn_ber(apsk, cfg);
    for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
        const auto& a = curve.points[i];
        const auto& b = curve.points[i + 1];
        const double slack = 3.0 * std::hypot(binom_sigma(a.ber, a.symbols * 4.0), binom_sigma(b.ber, b.symbols * 4.0));
        CHECK(b.ber <= a.ber + slack);
    }
}

TEST_CASE("symbol sampler hits the constellation mean energy") {
    const auto qam = baseline_constellation(BaselineKind::Qam, 64, ScaleConstraint::Amplitude, 1.0);
    const double emp = empirical_symbol_energy(qam, 21, 200000);
    CHECK(std::abs(emp - qam.mean_energy()) / qam.mean_energy() < 0.01);
}

TEST_CASE("amplitude CDF conventions") {
    SUBCASE("constant pattern of amplitude 10 steps at 0 dB") {
        BeamVector f;
        f.n_x = f.n_y = 1;
        f.values = Eigen::VectorXcd::Constant(1, 10.0);
        const auto cdf = beam_amplitude_cdf(f, AngularRange{-0.5, 0.5, -0.25, 0.25}, 20000, 9);
        REQUIRE(cdf.size() == 1);
        CHECK(cdf[0].first == doctest::Approx(0.0));
        CHECK(cdf[0].second == doctest::Approx(1.0));
    }
    SUBCASE("cdf is monotone and ends at 1") {
        BeamVector f;
        f.n_x = 4;
        f.n_y = 2;
        f.values = Eigen::VectorXcd::Ones(8);
        const auto cdf = beam_amplitude_cdf(f, AngularRange{-0.5, 0.5, -0.25, 0.25}, 20000, 9);
        for (std::size_t i = 1; i < cdf.size(); ++i) CHECK(cdf[i].second >= cdf[i - 1].second);
        CHECK(cdf.back().second == doctest::Approx(1.0));
    }
    SUBCASE("mask-fit baseline amplitudes sit in the documented low band") {
        const auto ls = normalized_ls_baseline({16, 16}, AngularRange{-0.5, 0.5, -0.25, 0.25});
        const auto cdf = beam_amplitude_cdf(ls, AngularRange{-0.5, 0.5, -0.25, 0.25}, 20000, 9);
        CHECK(cdf.front().first >= -12.5);
        CHECK(cdf.back().first <= -4.0);
    }
}

TEST_CASE("directional channel draw") {
    SUBCASE("noise-free channel matched by a conjugate beam has gain los * N") {
        ChannelConfig ch;
        ch.pathloss_db = 20.0;
        ch.nlos_gap_db = std::numeric_limits<double>::infinity();
        ch.range = AngularRange{0.3, 0.3 + 1e-9, -0.1, -0.1 + 1e-9};
        const ArrayGeometry g{8, 8};
        Rng rng = Rng::substream(1, 2, 3);
        const auto h = draw_channel(g, ch, rng);
        BeamVector f;
        f.n_x = f.n_y = 8;
        f.values = steering_vector<double>(g, 0.3, -0.1).conjugate();
        const std::complex<double> gain = (f.values.transpose() * h)(0);
        CHECK(std::abs(gain - std::complex<double>(0.1 * 64, 0.0)) < 1e-5);
    }
    SUBCASE("deterministic curves") {
        const auto qam = baseline_constellation(BaselineKind::Qam, 16, ScaleConstraint::Amplitude, 1.0);
        ChannelConfig ch;
        ch.range = AngularRange{-0.5, 0.5, -0.25, 0.25};
        ch.realizations = 50;
        ch.seed = 4;
        BeamVector f;
        f.n_x = f.n_y = 4;
        f.values = Eigen::VectorXcd::Ones(16);
        AwgnConfig cfg;
        cfg.ebn0_db = {10.0, 14.0};
        cfg.max_symbols = 50000;
        cfg.min_errors = 100000;
        cfg.seed = 77;
        const auto a = directional_ber(qam, f, ch, cfg);
        const auto b = directional_ber(qam, f, ch, cfg);
        REQUIRE(a.points.size() == 2);
        for (std::size_t i = 0; i < 2; ++i) {
            CHECK(a.points[i].errors == b.points[i].errors);
            CHECK(a.points[i].ber == b.points[i].ber);
        }
    }
}
