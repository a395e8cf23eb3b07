#include "ampcon/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <future>
#include <limits>

namespace ampcon {

namespace {

constexpr long long kBatchSymbols = 8192;

struct Alphabet {
    Eigen::VectorXcd points;
    std::vector<std::uint32_t> labels;
    int m = 0;
    int bits = 0;

    explicit Alphabet(const Constellation& c) : points(c.points), labels(c.bit_map), m(c.order()) {
        bits = c.bits_per_symbol();
        if (static_cast<int>(labels.size()) != m)
            throw std::invalid_argument("simulate: constellation has no bit labels");
    }

    int nearest(std::complex<double> y) const {
        if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) return 0;
        int best = 0;
        double bestd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < m; ++i) {
            const double d = std::norm(y - points[i]);
            if (d < bestd) {
                bestd = d;
                best = i;
            }
        }
        return best;
    }
};

double reference_energy(const Constellation& c, EnergyRef ref) {
    if (ref == EnergyRef::AmplitudeBound) {
        const double a = c.amplitude_bound;
        return a * a;
    }
    return c.mean_energy();
}

double noise_sigma_per_dim(double e_ref, int bits, double ebn0_db) {
    if (std::isinf(ebn0_db) && ebn0_db > 0) return 0.0;
    const double n0 = e_ref / (bits * std::pow(10.0, ebn0_db / 10.0));
    return std::sqrt(0.5 * n0);
}

/// Bit errors over one deterministic batch. The noise draw is rotated into
/// the transmitted symbol's phase frame; this leaves the distribution
/// unchanged (circular symmetry) and makes globally rotated constellations
/// reproduce identical error events.
long long awgn_batch(const Alphabet& alpha, double sigma_dim, Rng rng, long long count) {
    long long errors = 0;
    for (long long s = 0; s < count; ++s) {
        const int tx = static_cast<int>(rng.below(alpha.m));
        const std::complex<double> p = alpha.points[tx];
        const std::complex<double> z = rng.normal_pair();
        const double mag = std::abs(p);
        const std::complex<double> frame = mag > 0 ? p / mag : std::complex<double>(1.0, 0.0);
        const std::complex<double> y = p + frame * (sigma_dim * z);
        const int rx = alpha.nearest(y);
        errors += std::popcount(alpha.labels[tx] ^ alpha.labels[rx]);
    }
    return errors;
}

/// Evaluates batches with at most `threads` workers and folds the per-batch
/// results strictly in index order, stopping at the first batch whose
/// cumulative error count reaches min_errors. The outcome is identical for
/// every thread count.
template <typename BatchFn>
BerPoint accumulate_batches(double ebn0_db, long long n_batches, long long batch_symbols, long long last_batch,
                            long long min_errors, int bits, int threads, BatchFn&& batch_errors) {
    BerPoint point;
    point.ebn0_db = ebn0_db;

    const int workers = std::max(1, threads);
    long long next = 0;
    while (next < n_batches) {
        const long long chunk = std::min<long long>(n_batches - next, workers);
        std::vector<long long> results(chunk);
        if (workers == 1 || chunk == 1) {
            for (long long k = 0; k < chunk; ++k) results[k] = batch_errors(next + k);
        } else {
            std::vector<std::future<long long>> fut;
            for (long long k = 0; k < chunk; ++k)
                fut.push_back(std::async(std::launch::async, [&, k] { return batch_errors(next + k); }));
            for (long long k = 0; k < chunk; ++k) results[k] = fut[k].get();
        }
        bool stop = false;
        for (long long k = 0; k < chunk; ++k) {
            const long long b = next + k;
            point.errors += results[k];
            point.symbols += (b == n_batches - 1) ? last_batch : batch_symbols;
            if (point.errors >= min_errors) {
                stop = true;
                break;
            }
        }
        if (stop) break;
        next += chunk;
    }
    point.ber = point.symbols > 0 ? static_cast<double>(point.errors) / (static_cast<double>(point.symbols) * bits)
                                  : 0.0;
    return point;
}

}  // namespace

BerCurve awgn_ber(const Constellation& c, const AwgnConfig& cfg) {
    const Alphabet alpha(c);
    const double e_ref = reference_energy(c, cfg.energy_ref);
    if (cfg.min_errors < 1) throw std::invalid_argument("awgn_ber: min_errors must be >= 1");

    BerCurve curve;
    if (cfg.max_symbols <= 0) return curve;

    const long long n_batches = (cfg.max_symbols + kBatchSymbols - 1) / kBatchSymbols;
    const long long last_batch = cfg.max_symbols - (n_batches - 1) * kBatchSymbols;

    for (std::size_t q = 0; q < cfg.ebn0_db.size(); ++q) {
        const double sigma = noise_sigma_per_dim(e_ref, alpha.bits, cfg.ebn0_db[q]);
        auto batch_errors = [&, sigma, q](long long b) {
            const long long count = (b == n_batches - 1) ? last_batch : kBatchSymbols;
            return awgn_batch(alpha, sigma, Rng::substream(cfg.seed, q, static_cast<std::uint64_t>(b)), count);
        };
        curve.points.push_back(accumulate_batches(cfg.ebn0_db[q], n_batches, kBatchSymbols, last_batch,
                                                  cfg.min_errors, alpha.bits, cfg.threads, batch_errors));
    }
    return curve;
}

Eigen::VectorXcd draw_channel(const ArrayGeometry& geom, const ChannelConfig& ch, Rng& rng) {
    geom.validate();
    ch.range.validate();

    const double psi_x = rng.uniform(ch.range.x_lo, ch.range.x_hi);
    const double psi_y = rng.uniform(ch.range.y_lo, ch.range.y_hi);
    const double los_gain = std::pow(10.0, -ch.pathloss_db / 20.0);
    const double sigma2 =
        std::isinf(ch.nlos_gap_db) ? 0.0 : std::pow(10.0, -(ch.pathloss_db + ch.nlos_gap_db) / 10.0);
    const double per_dim = std::sqrt(0.5 * sigma2);

    Eigen::VectorXcd h = los_gain * steering_vector<double>(geom, psi_x, psi_y);
    for (Eigen::Index i = 0; i < h.size(); ++i) h[i] += per_dim * rng.normal_pair();
    return h;
}

BerCurve directional_ber(const Constellation& c, const BeamVector& f, const ChannelConfig& ch,
                         const AwgnConfig& cfg) {
    const Alphabet alpha(c);
    const double e_ref = reference_energy(c, cfg.energy_ref);
    if (ch.realizations < 1) throw std::invalid_argument("directional_ber: realizations must be >= 1");
    if (f.values.size() != f.geometry().size())
        throw std::invalid_argument("directional_ber: beam vector does not match its geometry");

    BerCurve curve;
    if (cfg.max_symbols <= 0) return curve;

    const long long per_real = std::max<long long>(1, cfg.max_symbols / ch.realizations);
    const long long n_batches = ch.realizations;

    for (std::size_t q = 0; q < cfg.ebn0_db.size(); ++q) {
        const double sigma = noise_sigma_per_dim(e_ref, alpha.bits, cfg.ebn0_db[q]);
        auto batch_errors = [&, sigma, q](long long r) {
            // Channel draw depends on (channel seed, realization) only, so
            // every Eb/N0 point sees the same channel set.
            Rng ch_rng = Rng::substream(ch.seed, 0xC4A11ull, static_cast<std::uint64_t>(r));
            const Eigen::VectorXcd h = draw_channel(f.geometry(), ch, ch_rng);
            const std::complex<double> g = (f.values.transpose() * h)(0);

            Rng rng = Rng::substream(cfg.seed, q, static_cast<std::uint64_t>(r));
            long long errors = 0;
            for (long long s = 0; s < per_real; ++s) {
                const int tx = static_cast<int>(rng.below(alpha.m));
                const std::complex<double> y = g * alpha.points[tx] + sigma * rng.normal_pair();
                const int rx = alpha.nearest(g != std::complex<double>(0.0, 0.0) ? y / g : y);
                errors += std::popcount(alpha.labels[tx] ^ alpha.labels[rx]);
            }
            return errors;
        };
        curve.points.push_back(accumulate_batches(cfg.ebn0_db[q], n_batches, per_real, per_real, cfg.min_errors,
                                                  alpha.bits, cfg.threads, batch_errors));
    }
    return curve;
}

double empirical_symbol_energy(const Constellation& c, std::uint64_t seed, long long n) {
    const Alphabet alpha(c);
    Rng rng = Rng::substream(seed, 0, 0);
    double sum = 0.0;
    for (long long s = 0; s < n; ++s) {
        const int tx = static_cast<int>(rng.below(alpha.m));
        rng.normal_pair();  // keep the draw sequence aligned with awgn_batch
        sum += std::norm(alpha.points[tx]);
    }
    return sum / static_cast<double>(n);
}

std::vector<std::pair<double, double>> beam_amplitude_cdf(const BeamVector& f, const AngularRange& range,
                                                          long long samples, std::uint64_t seed) {
    range.validate();
    if (samples < 10000) throw std::invalid_argument("beam_amplitude_cdf: need at least 10000 samples");
    if (f.values.size() != f.geometry().size())
        throw std::invalid_argument("beam_amplitude_cdf: beam vector does not match its geometry");

    Rng rng = Rng::substream(seed, 0xCDFull);
    std::vector<double> amp_db(samples);
    for (long long s = 0; s < samples; ++s) {
        const double px = rng.uniform(range.x_lo, range.x_hi);
        const double py = rng.uniform(range.y_lo, range.y_hi);
        const double amp = std::abs(steering_vector<double>(f.geometry(), px, py).dot(f.values));
        amp_db[s] = amp > 0 ? 20.0 * std::log10(amp / 10.0) : -400.0;
    }
    std::sort(amp_db.begin(), amp_db.end());

    const long long k_lo = static_cast<long long>(std::floor(amp_db.front() / 0.5));
    const long long k_hi = static_cast<long long>(std::ceil(amp_db.back() / 0.5));
    std::vector<std::pair<double, double>> cdf;
    for (long long k = k_lo; k <= k_hi; ++k) {
        const double edge = 0.5 * k;
        const auto it = std::upper_bound(amp_db.begin(), amp_db.end(), edge + 1e-12);
        cdf.emplace_back(edge, static_cast<double>(it - amp_db.begin()) / static_cast<double>(samples));
    }
    return cdf;
}

}  // namespace ampcon
