#include "ampcon/beamforming.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <iostream>

#include "ampcon/rng.hpp"

namespace ampcon {

Eigen::MatrixXcd objective_matrix(const Eigen::VectorXcd& v, double alpha, const Eigen::MatrixXcd& coverage) {
    if (v.size() != coverage.rows() || coverage.rows() != coverage.cols())
        throw std::invalid_argument("objective_matrix: dimension mismatch");
    return v * v.adjoint() + alpha * coverage;
}

namespace {

/// Per-entry renormalization of the temporary iterate; zero magnitudes keep
/// the previous entry's phase (limit convention).
Eigen::VectorXcd normalize_phases(const Eigen::VectorXcd& tmp, const Eigen::VectorXcd& prev, int* zero_events) {
    Eigen::VectorXcd out(tmp.size());
    for (Eigen::Index i = 0; i < tmp.size(); ++i) {
        const double mag = std::abs(tmp[i]);
        if (mag == 0.0) {
            const double pmag = std::abs(prev[i]);
            out[i] = pmag > 0 ? prev[i] / pmag : std::complex<double>(1.0, 0.0);
            if (zero_events) ++*zero_events;
        } else {
            out[i] = tmp[i] / mag;
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXcd cmpim_step(const Eigen::VectorXcd& f, const Eigen::MatrixXcd& m, double step, int* zero_events) {
    if (!(step > 0)) throw std::invalid_argument("cmpim_step: step must be positive");
    if (f.size() != m.rows()) throw std::invalid_argument("cmpim_step: dimension mismatch");
    const Eigen::VectorXcd tmp = f + step * (m * f);
    return normalize_phases(tmp, f, zero_events);
}

std::vector<double> solver_grid(int n, double lo, double hi, int refine) {
    if (refine < 1) throw std::invalid_argument("solver_grid: refine must be >= 1");
    const double step = 2.0 / n / refine;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g(std::max(count, 0));
    for (int k = 0; k < count; ++k) g[k] = lo + step * k;
    return g;
}

namespace {

struct AxisProblem {
    std::vector<double> grid;
    Eigen::MatrixXcd steer;     // grid.size() x n, row k = v(psi_k)^H
    Eigen::MatrixXcd coverage;  // weighted by alpha already
    double auto_step = 0.0;
};

AxisProblem build_axis_problem(int n, double lo, double hi, const CmpimConfig& cfg) {
    AxisProblem p;
    p.grid = solver_grid(n, lo, hi, cfg.grid_refine);
    if (p.grid.empty()) throw std::invalid_argument("solve_axis_maxmin: empty angle grid for this range");

    p.steer.resize(static_cast<Eigen::Index>(p.grid.size()), n);
    for (std::size_t k = 0; k < p.grid.size(); ++k)
        p.steer.row(static_cast<Eigen::Index>(k)) = axis_steering<double>(n, p.grid[k]).adjoint();
    p.coverage = cfg.alpha * axis_coverage<double>(n, lo, hi);

    const Eigen::MatrixXcd center =
        objective_matrix(axis_steering<double>(n, 0.5 * (lo + hi)), 1.0, p.coverage);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(center, Eigen::EigenvaluesOnly);
    p.auto_step = 0.1 / std::max(es.eigenvalues().maxCoeff(), 1e-12);
    return p;
}

struct RestartOutcome {
    Eigen::VectorXcd f;
    CmpimDiagnostics diag;
};

RestartOutcome run_restart(const AxisProblem& p, int n, double step, double tol, int max_iters,
                           std::uint64_t seed, int restart) {
    Rng rng = Rng::substream(seed, 0x9b1e5u, static_cast<std::uint64_t>(restart));
    Eigen::VectorXcd f(n);
    for (int i = 0; i < n; ++i) f[i] = std::polar(1.0, rng.uniform(0.0, 2.0 * M_PI));

    RestartOutcome out;
    out.diag.min_objective.reserve(max_iters);
    out.diag.argmin_psi.reserve(max_iters);

    // min_k f^H M_k f with M_k = v_k v_k^H + alpha V splits into the shared
    // band term plus |v_k^H f|^2, one matrix-vector product for all angles.
    int it = 0;
    for (; it < max_iters; ++it) {
        const Eigen::VectorXcd resp = p.steer * f;
        const Eigen::VectorXcd vf = p.coverage * f;
        const double band = f.dot(vf).real();
        int k = 0;
        double worst = std::norm(resp[0]);
        for (Eigen::Index g = 1; g < resp.size(); ++g) {
            const double o = std::norm(resp[g]);
            if (o < worst) {  // ties keep the smallest angle
                worst = o;
                k = static_cast<int>(g);
            }
        }
        out.diag.min_objective.push_back(worst + band);
        out.diag.argmin_psi.push_back(p.grid[k]);

        const Eigen::VectorXcd tmp = f + step * (p.steer.row(k).adjoint() * resp[k] + vf);
        Eigen::VectorXcd next = normalize_phases(tmp, f, &out.diag.zero_magnitude_events);
        const double diff = (next - f).norm();
        f = std::move(next);
        if (diff <= tol) {
            out.diag.converged = true;
            ++it;
            break;
        }
    }
    out.diag.iterations = it;

    const Eigen::VectorXcd resp = p.steer * f;
    double worst = std::norm(resp[0]);
    for (Eigen::Index g = 1; g < resp.size(); ++g) worst = std::min(worst, std::norm(resp[g]));
    out.diag.achieved_min = worst + f.dot(p.coverage * f).real();
    out.f = std::move(f);
    return out;
}

}  // namespace

AxisSolveResult solve_axis_maxmin(int n, double lo, double hi, const CmpimConfig& cfg) {
    if (n < 1) throw std::invalid_argument("solve_axis_maxmin: n must be >= 1");
    if (!(lo < hi) || lo < -1.0 || hi > 1.0) throw std::invalid_argument("solve_axis_maxmin: invalid axis range");
    if (cfg.max_iters < 1 || cfg.restarts < 1) throw std::invalid_argument("solve_axis_maxmin: bad iteration limits");

    const AxisProblem problem = build_axis_problem(n, lo, hi, cfg);
    const double step = cfg.step > 0 ? cfg.step : problem.auto_step;
    const double tol = cfg.tol > 0 ? cfg.tol : 1e-8 * std::sqrt(static_cast<double>(n));

    std::vector<RestartOutcome> outcomes(cfg.restarts);
    const int workers = std::max(1, cfg.threads);
    if (workers == 1) {
        for (int r = 0; r < cfg.restarts; ++r)
            outcomes[r] = run_restart(problem, n, step, tol, cfg.max_iters, cfg.seed, r);
    } else {
        std::vector<std::future<void>> fut;
        std::atomic<int> counter{0};
        for (int w = 0; w < workers; ++w) {
            fut.push_back(std::async(std::launch::async, [&]() {
                for (int r = counter.fetch_add(1); r < cfg.restarts; r = counter.fetch_add(1))
                    outcomes[r] = run_restart(problem, n, step, tol, cfg.max_iters, cfg.seed, r);
            }));
        }
        for (auto& fr : fut) fr.get();
    }

    // Reduction in restart order: largest achieved min wins, first on ties.
    int best = 0;
    for (int r = 1; r < cfg.restarts; ++r)
        if (outcomes[r].diag.achieved_min > outcomes[best].diag.achieved_min) best = r;

    AxisSolveResult result;
    result.f = std::move(outcomes[best].f);
    result.diag = std::move(outcomes[best].diag);
    result.diag.best_restart = best;
    return result;
}

BeamVector solve_planar_separable(const ArrayGeometry& geom, const AngularRange& range, const CmpimConfig& cfg,
                                  CmpimDiagnostics* diag_x, CmpimDiagnostics* diag_y) {
    geom.validate();
    range.validate();

    CmpimConfig cy = cfg;
    cy.seed = cfg.seed ^ 0x517cc1b727220a95ull;  // independent restarts per axis
    AxisSolveResult rx = solve_axis_maxmin(geom.n_x, range.x_lo, range.x_hi, cfg);
    AxisSolveResult ry = solve_axis_maxmin(geom.n_y, range.y_lo, range.y_hi, cy);
    if (diag_x) *diag_x = rx.diag;
    if (diag_y) *diag_y = ry.diag;

    BeamVector f;
    f.n_x = geom.n_x;
    f.n_y = geom.n_y;
    f.contract = ModulusContract::UnitModulus;
    f.values.resize(geom.size());
    for (int a = 0; a < geom.n_x; ++a) f.values.segment(a * geom.n_y, geom.n_y) = rx.f[a] * ry.f;
    f.fx = std::move(rx.f);
    f.fy = std::move(ry.f);
    return f;
}

Eigen::VectorXcd axis_ls_fit(int n, double lo, double hi, int oversample) {
    if (n < 1) throw std::invalid_argument("axis_ls_fit: n must be >= 1");
    if (oversample < 2) throw std::invalid_argument("axis_ls_fit: oversample must be >= 2");

    const int t = oversample * n;
    Eigen::MatrixXcd a(t, n);
    Eigen::VectorXcd mask(t);
    for (int i = 0; i < t; ++i) {
        const double psi = -1.0 + 2.0 * i / t;
        a.row(i) = axis_steering<double>(n, psi).adjoint();
        mask[i] = (psi >= lo && psi < hi) ? 1.0 : 0.0;
    }

    const Eigen::MatrixXcd gram = a.adjoint() * a;
    const Eigen::VectorXcd rhs = a.adjoint() * mask;
    double ridge = 1e-9;
    for (;;) {
        Eigen::MatrixXcd reg = gram;
        reg.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::MatrixXcd> ldlt(reg);
        Eigen::VectorXcd f = ldlt.solve(rhs);
        if (ldlt.info() == Eigen::Success && f.allFinite()) return f;
        ridge *= 1e3;
        std::cerr << "axis_ls_fit: normal matrix ill-conditioned, retrying with ridge " << ridge << "\n";
        if (ridge > 1.0) throw std::runtime_error("axis_ls_fit: normal equations unsolvable");
    }
}

BeamVector normalized_ls_baseline(const ArrayGeometry& geom, const AngularRange& range, int grid_oversample) {
    geom.validate();
    range.validate();

    Eigen::VectorXcd fx = axis_ls_fit(geom.n_x, range.x_lo, range.x_hi, grid_oversample);
    Eigen::VectorXcd fy = axis_ls_fit(geom.n_y, range.y_lo, range.y_hi, grid_oversample);
    fx /= fx.cwiseAbs().maxCoeff();
    fy /= fy.cwiseAbs().maxCoeff();

    BeamVector f;
    f.n_x = geom.n_x;
    f.n_y = geom.n_y;
    f.contract = ModulusContract::AmplitudeBounded;
    f.values.resize(geom.size());
    for (int a = 0; a < geom.n_x; ++a) f.values.segment(a * geom.n_y, geom.n_y) = fx[a] * fy;
    f.fx = std::move(fx);
    f.fy = std::move(fy);
    return f;
}

PatternMetrics pattern_metrics(const BeamVector& f, const AngularRange& range, int samples) {
    return pattern_metrics(f.values, f.geometry(), range, samples);
}

}  // namespace ampcon
