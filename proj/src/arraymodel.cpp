#include "ampcon/arraymodel.hpp"

namespace ampcon {

PatternMetrics pattern_metrics(const Eigen::VectorXcd& f, const ArrayGeometry& geom, const AngularRange& range,
                               int samples) {
    geom.validate();
    range.validate();
    if (f.size() != geom.size()) throw std::invalid_argument("pattern_metrics: vector length mismatch");
    if (samples < 1000) throw std::invalid_argument("pattern_metrics: need at least 1000 samples");

    const int side = std::max(2, static_cast<int>(std::lround(std::sqrt(static_cast<double>(samples)))));

    // Midpoint tensor grid of the range; |v(x,y)^H f| = |b^H F conj(a)| with
    // F the column-major reshape of f, a = v_x(x), b = v_y(y).
    Eigen::MatrixXcd ax(side, geom.n_x), ay(side, geom.n_y);
    for (int i = 0; i < side; ++i) {
        const double px = range.x_lo + (i + 0.5) * (range.x_hi - range.x_lo) / side;
        const double py = range.y_lo + (i + 0.5) * (range.y_hi - range.y_lo) / side;
        ax.row(i) = axis_steering<double>(geom.n_x, px).transpose();
        ay.row(i) = axis_steering<double>(geom.n_y, py).transpose();
    }
    Eigen::Map<const Eigen::MatrixXcd> fm(f.data(), geom.n_y, geom.n_x);
    const Eigen::MatrixXd amp = (ay.conjugate() * fm * ax.adjoint()).cwiseAbs();

    PatternMetrics out;
    out.v_mean = amp.mean();
    out.ripple_factor =
        out.v_mean > 0 ? std::sqrt((amp.array() - out.v_mean).square().mean()) / out.v_mean : 0.0;
    out.in_band_power = in_band_power<double>(f, coverage_matrix<double>(geom, range));
    out.power_ratio = out.in_band_power / (4.0 * geom.size());
    return out;
}

}  // namespace ampcon
