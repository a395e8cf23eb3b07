#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ampcon/arraymodel.hpp"

namespace ampcon {

enum class ModulusContract { UnitModulus, AmplitudeBounded };

/// Reflection-coefficient vector of a planar array, optionally carrying the
/// per-axis Kronecker factors it was composed from.
struct BeamVector {
    Eigen::VectorXcd values;
    int n_x = 0;
    int n_y = 0;
    std::optional<Eigen::VectorXcd> fx;
    std::optional<Eigen::VectorXcd> fy;
    ModulusContract contract = ModulusContract::UnitModulus;

    ArrayGeometry geometry() const { return {n_x, n_y}; }
};

struct CmpimConfig {
    double alpha = 4.0;     // weight of the in-band power term
    double step = 0.0;      // 0 = auto: 0.1 / lambda_max at the band center
    double tol = 0.0;       // 0 = auto: 1e-8 * sqrt(n)
    int max_iters = 10000;
    int restarts = 16;
    int grid_refine = 4;    // min-term grid density, multiples of the 2/n base step
    std::uint64_t seed = 1;
    int threads = 1;
};

struct CmpimDiagnostics {
    int iterations = 0;
    bool converged = false;
    double achieved_min = 0.0;        // min over the grid of f^H M f at exit
    int best_restart = -1;
    int zero_magnitude_events = 0;
    std::vector<double> min_objective;  // per iteration, winning restart
    std::vector<double> argmin_psi;
};

/// Per-angle objective matrix v v^H + alpha * V.
Eigen::MatrixXcd objective_matrix(const Eigen::VectorXcd& v, double alpha, const Eigen::MatrixXcd& coverage);

/// One constant-modulus power iteration: per-entry renormalization of
/// f + step * M f. Entries that land exactly on zero keep their previous
/// phase (and are counted through zero_events when given).
Eigen::VectorXcd cmpim_step(const Eigen::VectorXcd& f, const Eigen::MatrixXcd& m, double step,
                            int* zero_events = nullptr);

struct AxisSolveResult {
    Eigen::VectorXcd f;
    CmpimDiagnostics diag;
};

/// Angle grid the axis solver enforces its min term on: the 2/n base step
/// divided by `refine`. refine=1 is the base grid of make_grid; the default
/// densification pins the pattern between base-grid angles as well, which
/// the base grid is too coarse to see for an n-element pattern.
std::vector<double> solver_grid(int n, double lo, double hi, int refine);

/// Max-min synthesis of one axis factor: repeatedly steps the iteration on
/// the grid angle currently worst-served, stopping on iterate difference
/// <= tol or max_iters; the best of `restarts` random starts wins (largest
/// min-over-grid objective, then smallest restart index).
AxisSolveResult solve_axis_maxmin(int n, double lo, double hi, const CmpimConfig& cfg);

/// Separable planar design f = f_x kron f_y from two axis solves.
BeamVector solve_planar_separable(const ArrayGeometry& geom, const AngularRange& range, const CmpimConfig& cfg,
                                  CmpimDiagnostics* diag_x = nullptr, CmpimDiagnostics* diag_y = nullptr);

/// Least-squares fit of one axis response to the ideal rectangular mask on
/// an oversampled grid of the full direction-cosine interval, before peak
/// normalization.
Eigen::VectorXcd axis_ls_fit(int n, double lo, double hi, int oversample);

/// Conventional baseline: per-axis LS mask fit, normalized to unit peak
/// amplitude, composed by Kronecker product.
BeamVector normalized_ls_baseline(const ArrayGeometry& geom, const AngularRange& range, int grid_oversample = 8);

PatternMetrics pattern_metrics(const BeamVector& f, const AngularRange& range, int samples = 65536);

}  // namespace ampcon
