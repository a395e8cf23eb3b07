#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ampcon {

template <typename Scalar = double>
using ComplexVector = Eigen::Vector<std::complex<Scalar>, Eigen::Dynamic>;
template <typename Scalar = double>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

/// Rectangular planar array, half-wavelength spacing, n_x * n_y elements.
struct ArrayGeometry {
    int n_x = 1;
    int n_y = 1;

    int size() const { return n_x * n_y; }
    void validate() const {
        if (n_x < 1 || n_y < 1) throw std::invalid_argument("ArrayGeometry: element counts must be >= 1");
    }
};

/// Rectangle [x_lo, x_hi) x [y_lo, y_hi) in direction-cosine space.
struct AngularRange {
    double x_lo = -1.0, x_hi = 1.0;
    double y_lo = -1.0, y_hi = 1.0;

    double area() const { return (x_hi - x_lo) * (y_hi - y_lo); }
    void validate() const {
        auto ok = [](double lo, double hi) { return lo >= -1.0 && hi <= 1.0 && lo < hi; };
        if (!ok(x_lo, x_hi) || !ok(y_lo, y_hi))
            throw std::invalid_argument("AngularRange: need -1 <= lo < hi <= 1 on both axes");
    }
};

/// One-axis response [1, e^{j pi psi}, ..., e^{j (n-1) pi psi}].
template <typename Scalar = double>
ComplexVector<Scalar> axis_steering(int n, Scalar psi) {
    ComplexVector<Scalar> v(n);
    for (int k = 0; k < n; ++k) v[k] = std::polar(Scalar(1), Scalar(k) * Scalar(M_PI) * psi);
    return v;
}

/// Planar response v(psi_x) kron v(psi_y).
template <typename Scalar = double>
ComplexVector<Scalar> steering_vector(const ArrayGeometry& geom, Scalar psi_x, Scalar psi_y) {
    geom.validate();
    const ComplexVector<Scalar> vx = axis_steering<Scalar>(geom.n_x, psi_x);
    const ComplexVector<Scalar> vy = axis_steering<Scalar>(geom.n_y, psi_y);
    ComplexVector<Scalar> v(geom.size());
    for (int a = 0; a < geom.n_x; ++a) v.segment(a * geom.n_y, geom.n_y) = vx[a] * vy;
    return v;
}

/// One-axis coverage matrix: the steering outer product integrated over
/// [lo, hi). Diagonal entries are hi - lo; off-diagonal entries are
/// (e^{j d pi hi} - e^{j d pi lo}) / (j d pi) with d the index difference.
template <typename Scalar = double>
ComplexMatrix<Scalar> axis_coverage(int n, Scalar lo, Scalar hi) {
    if (n < 1) throw std::invalid_argument("axis_coverage: n must be >= 1");
    ComplexMatrix<Scalar> m(n, n);
    const std::complex<Scalar> j(0, 1);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            if (r == c) {
                m(r, c) = hi - lo;
            } else {
                const Scalar d = Scalar(r - c) * Scalar(M_PI);
                m(r, c) = (std::exp(j * d * hi) - std::exp(j * d * lo)) / (j * d);
            }
        }
    }
    return m;
}

/// Kronecker-factored coverage of a planar range: full matrix is v_x kron v_y.
template <typename Scalar = double>
struct CoverageMatrix {
    ComplexMatrix<Scalar> v_x;
    ComplexMatrix<Scalar> v_y;

    int size() const { return static_cast<int>(v_x.rows() * v_y.rows()); }

    /// Materialized Kronecker product; refused above 4096 x 4096.
    ComplexMatrix<Scalar> dense() const {
        const int nx = static_cast<int>(v_x.rows()), ny = static_cast<int>(v_y.rows());
        if (nx * ny > 4096) throw std::invalid_argument("CoverageMatrix: dense form too large");
        ComplexMatrix<Scalar> full(nx * ny, nx * ny);
        for (int a = 0; a < nx; ++a)
            for (int b = 0; b < nx; ++b)
                full.block(a * ny, b * ny, ny, ny) = v_x(a, b) * v_y;
        return full;
    }
};

template <typename Scalar = double>
CoverageMatrix<Scalar> coverage_matrix(const ArrayGeometry& geom, const AngularRange& range) {
    geom.validate();
    range.validate();
    return {axis_coverage<Scalar>(geom.n_x, Scalar(range.x_lo), Scalar(range.x_hi)),
            axis_coverage<Scalar>(geom.n_y, Scalar(range.y_lo), Scalar(range.y_hi))};
}

/// In-band reflected power f^H (v_x kron v_y) f without materializing the
/// Kronecker product: with f reshaped column-major into F (n_y x n_x) the
/// form equals tr(F^H V_y F V_x^T).
template <typename Scalar>
Scalar in_band_power(const ComplexVector<Scalar>& f, const CoverageMatrix<Scalar>& cov) {
    const int nx = static_cast<int>(cov.v_x.rows()), ny = static_cast<int>(cov.v_y.rows());
    if (f.size() != static_cast<Eigen::Index>(nx) * ny)
        throw std::invalid_argument("in_band_power: vector length does not match the coverage matrix");
    Eigen::Map<const ComplexMatrix<Scalar>> fm(f.data(), ny, nx);
    const std::complex<Scalar> p = (fm.adjoint() * cov.v_y * fm * cov.v_x.transpose()).trace();
    return p.real();
}

/// Axis grid psi_k = lo + (2/n) k, k = 0 .. floor((hi-lo)/(2/n)) - 1.
inline std::vector<double> axis_grid(int n, double lo, double hi) {
    if (n < 1) throw std::invalid_argument("axis_grid: n must be >= 1");
    const double step = 2.0 / n;
    const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    std::vector<double> g(std::max(count, 0));
    for (int k = 0; k < count; ++k) g[k] = lo + step * k;
    return g;
}

struct AngleGrid {
    std::vector<std::pair<double, double>> points;
};

inline AngleGrid make_grid(const ArrayGeometry& geom, const AngularRange& range) {
    geom.validate();
    range.validate();
    AngleGrid g;
    const auto gx = axis_grid(geom.n_x, range.x_lo, range.x_hi);
    const auto gy = axis_grid(geom.n_y, range.y_lo, range.y_hi);
    for (double x : gx)
        for (double y : gy) g.points.emplace_back(x, y);
    return g;
}

/// Flatness and power figures of a 2-D beam pattern over a range.
struct PatternMetrics {
    double ripple_factor = 0.0;
    double v_mean = 0.0;
    double in_band_power = 0.0;
    double power_ratio = 0.0;
};

/// Pattern amplitude statistics on a deterministic midpoint tensor grid of
/// roughly `samples` points; in-band power and power ratio come from the
/// closed-form coverage matrix (power ratio is relative to the 4N all-space
/// maximum of a constant-modulus vector).
PatternMetrics pattern_metrics(const Eigen::VectorXcd& f, const ArrayGeometry& geom, const AngularRange& range,
                               int samples = 65536);

}  // namespace ampcon
