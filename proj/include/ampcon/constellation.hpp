#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ampcon {

/// Raised when a ring-size combination admits no valid radius assignment.
/// The enumeration in design_best_apsk prunes such candidates.
class infeasible_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ring occupation counts N_1 <= N_2 <= ... <= N_L of an APSK constellation.
/// N_l == 1 is allowed only for the innermost ring (a single center point).
struct RingSpec {
    std::vector<int> points_per_ring;

    int ring_count() const { return static_cast<int>(points_per_ring.size()); }
    int order() const;
    void validate() const;
};

/// Full APSK geometry: ring sizes, radii (strictly increasing, outermost
/// equal to the amplitude bound) and reference phases. Phases are stored as
/// accumulated values; reduce_phase() maps them to the canonical interval
/// [0, 2*pi/N_l) without changing the point set.
struct ApskParams {
    RingSpec rings;
    std::vector<double> radii;
    std::vector<double> phases;
    double amplitude_bound = 1.0;

    void validate() const;
};

/// Reduce a ring reference phase to [0, 2*pi/n); the realized points are
/// invariant under this reduction.
double reduce_phase(double omega, int n);

/// An ordered complex alphabet with bit labels. `params` is present for
/// ring-structured (APSK/PSK) constellations and absent for QAM baselines.
struct Constellation {
    Eigen::VectorXcd points;
    std::vector<std::uint32_t> bit_map;  // bit_map[i] = label of points[i]
    double amplitude_bound = 1.0;
    std::optional<ApskParams> params;

    int order() const { return static_cast<int>(points.size()); }
    int bits_per_symbol() const;
    double mean_energy() const;
    double peak_amplitude() const;
};

struct DistanceReport {
    double d_min = 0.0;
    std::pair<int, int> arg_pair{-1, -1};
    std::vector<double> per_ring_intra;   // realized intra-ring minima (rings with >= 2 points)
    std::vector<double> inter_adjacent;   // realized minima between rings l and l+1
};

/// Chord distance between adjacent points of an n-point ring of radius r.
double intra_ring_dmin(double r, int n);

/// Minimum angular separation between two rings with the given reference
/// phase difference, from an exact scan over all n_l * n_next point pairs.
double min_inter_ring_phase(int n_l, int n_next, double delta_omega);

struct PhaseShift {
    double delta_omega;  // optimal reference-phase offset between the rings
    double phi;          // resulting minimum angular separation
};

/// Closed-form optimum pi / lcm(n_l, n_next) for both the offset and the
/// achieved separation (canonical branch of the optimizer family).
PhaseShift optimal_phase_shift(int n_l, int n_next);

/// Smallest feasible radius for the next ring given the intra-ring and
/// adjacent-inter-ring distance constraints at the target distance.
/// Throws infeasible_error when no radius strictly beyond r_prev works.
double next_ring_radius(double r_prev, int n_next, double phi_star, double d_target);

/// Innermost-to-outermost recursive construction with optimal phase offsets,
/// normalized so the outermost radius equals amplitude_bound.
ApskParams construct_apsk(const RingSpec& rings, double amplitude_bound);

/// Point set realized from APSK parameters (labels not yet assigned).
Constellation realize(const ApskParams& params);

/// Exact O(M^2) pairwise scan; the oracle backing every d_min claim.
DistanceReport brute_force_dmin(const Constellation& c);

struct ApskDesign {
    ApskParams params;
    DistanceReport report;
};

/// Exhaustive search over ring partitions of M (Algorithm: enumerate,
/// construct, score by realized brute-force d_min). Ties resolved by fewer
/// rings, then lexicographically smallest ring sizes.
ApskDesign design_best_apsk(int M, double amplitude_bound, int max_rings = 6);

/// Ring partitions explored by design_best_apsk. With prune=false the
/// enumeration keeps size-2 rings everywhere; the pruned and unpruned
/// searches must agree on the winner (verified in tests).
std::vector<std::vector<int>> enumerate_ring_partitions(int M, int max_rings, bool prune = true);

enum class BaselineKind { Psk, Qam };
enum class ScaleConstraint { Amplitude, Power };

/// Conventional constellations for comparison. QAM layouts: M=8 is a 4x2
/// rectangle, M=16/64 are square grids, M=32 is the cross. Under Amplitude
/// the peak modulus is scaled to `bound`; under Power the mean symbol energy
/// is scaled to bound^2.
Constellation baseline_constellation(BaselineKind kind, int M, ScaleConstraint constraint, double bound);

/// Quasi-Gray labeling: ring-structured constellations get a Gray walk along
/// the ring-major point order refined by greedy pairwise swaps that minimize
/// label Hamming distance over near-minimum-distance pairs; rectangular QAM
/// grids get the exact per-axis Gray product. Deterministic.
Constellation assign_bit_labels(Constellation c);

/// Rescale so the mean symbol energy equals bound^2 (labels kept).
Constellation rescale_to_power(Constellation c, double bound);

}  // namespace ampcon
