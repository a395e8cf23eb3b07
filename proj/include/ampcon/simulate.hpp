#pragma once

#include <cstdint>
#include <vector>

#include "ampcon/beamforming.hpp"
#include "ampcon/constellation.hpp"
#include "ampcon/rng.hpp"

namespace ampcon {

/// Energy reference of the Eb/N0 axis. AmplitudeBound charges every
/// constellation the same incident-carrier energy A^2 per symbol, which is
/// the budget an amplitude-limited reflector actually spends and keeps the
/// peak-scaled constellations comparable; MeanSymbolEnergy is the classic
/// transmit-power reference.
enum class EnergyRef { AmplitudeBound, MeanSymbolEnergy };

struct AwgnConfig {
    std::vector<double> ebn0_db;
    long long min_errors = 200;
    long long max_symbols = 1000000;
    std::uint64_t seed = 1;
    EnergyRef energy_ref = EnergyRef::AmplitudeBound;
    int threads = 1;
};

struct BerPoint {
    double ebn0_db = 0.0;
    double ber = 0.0;
    long long symbols = 0;
    long long errors = 0;  // bit errors
};

struct BerCurve {
    std::vector<BerPoint> points;
};

struct ChannelConfig {
    double pathloss_db = 20.0;   // -10 log10 |los_gain|^2
    double nlos_gap_db = 10.0;   // NLoS power this many dB below LoS
    AngularRange range;
    long long realizations = 1000;
    std::uint64_t seed = 1;
};

/// Uncoded maximum-likelihood BER over AWGN. Noise draws are phase-referenced
/// to the transmitted symbol, so a globally rotated constellation reproduces
/// the exact same error events under the same seed. A point stops once
/// min_errors bit errors are seen (checked at batch granularity) or at
/// max_symbols; results are independent of the thread count.
BerCurve awgn_ber(const Constellation& c, const AwgnConfig& cfg);

/// One LoS + NLoS channel draw: los_gain * v(psi_x, psi_y) + CN(0, sigma^2 I)
/// with the angle uniform over the configured range.
Eigen::VectorXcd draw_channel(const ArrayGeometry& geom, const ChannelConfig& ch, Rng& rng);

/// End-to-end backscatter BER: per channel realization the scalar link gain
/// is g = h^T f, detection is coherent with g known. Channel realizations are
/// shared across Eb/N0 points for a given seed.
BerCurve directional_ber(const Constellation& c, const BeamVector& f, const ChannelConfig& ch,
                         const AwgnConfig& cfg);

/// Empirical CDF of the in-band beam amplitude on the 20*log10(|v^H f|/10)
/// scale, at 0.5 dB bins, from uniformly sampled angles.
std::vector<std::pair<double, double>> beam_amplitude_cdf(const BeamVector& f, const AngularRange& range,
                                                          long long samples, std::uint64_t seed);

/// Mean energy of n symbols drawn exactly as the AWGN simulator draws them
/// (first batch of the first curve point); sanity hook for the Eb/N0
/// bookkeeping.
double empirical_symbol_energy(const Constellation& c, std::uint64_t seed, long long n);

}  // namespace ampcon
