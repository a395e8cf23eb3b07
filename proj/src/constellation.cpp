#include "ampcon/constellation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace ampcon {

namespace {

constexpr double kTwoPi = 2.0 * M_PI;

std::uint32_t gray_code(std::uint32_t k) { return k ^ (k >> 1); }

bool is_power_of_two(int m) { return m >= 1 && (m & (m - 1)) == 0; }

int int_log2(int m) {
    int b = 0;
    while ((1 << b) < m) ++b;
    return b;
}

}  // namespace

int RingSpec::order() const {
    return std::accumulate(points_per_ring.begin(), points_per_ring.end(), 0);
}

void RingSpec::validate() const {
    if (points_per_ring.empty()) throw std::invalid_argument("RingSpec: no rings");
    for (std::size_t l = 0; l < points_per_ring.size(); ++l) {
        const int n = points_per_ring[l];
        if (n < 1) throw std::invalid_argument("RingSpec: ring sizes must be positive");
        if (n == 1 && l != 0)
            throw std::invalid_argument("RingSpec: a 1-point ring is only allowed innermost");
        if (l > 0 && n < points_per_ring[l - 1])
            throw std::invalid_argument("RingSpec: ring sizes must be non-decreasing");
    }
}

void ApskParams::validate() const {
    rings.validate();
    const std::size_t L = rings.points_per_ring.size();
    if (radii.size() != L || phases.size() != L)
        throw std::invalid_argument("ApskParams: radii/phases length mismatch");
    if (!(amplitude_bound > 0)) throw std::invalid_argument("ApskParams: bound must be positive");
    if (radii.front() < 0) throw std::invalid_argument("ApskParams: negative radius");
    if (radii.front() == 0.0 && rings.points_per_ring.front() != 1)
        throw std::invalid_argument("ApskParams: zero radius needs a 1-point ring");
    for (std::size_t l = 1; l < L; ++l) {
        if (!(radii[l] > radii[l - 1] * (1.0 + 1e-9)) || !(radii[l] > 0))
            throw std::invalid_argument("ApskParams: radii must be strictly increasing");
    }
    if (std::abs(radii.back() - amplitude_bound) > 1e-12 * amplitude_bound)
        throw std::invalid_argument("ApskParams: outermost radius must equal the bound");
}

double reduce_phase(double omega, int n) {
    if (n < 1) throw std::invalid_argument("reduce_phase: n must be positive");
    const double period = kTwoPi / n;
    double w = std::fmod(omega, period);
    if (w < 0) w += period;
    return w;
}

int Constellation::bits_per_symbol() const {
    if (!is_power_of_two(order())) throw std::invalid_argument("order is not a power of two");
    return int_log2(order());
}

double Constellation::mean_energy() const {
    return points.squaredNorm() / static_cast<double>(points.size());
}

double Constellation::peak_amplitude() const {
    double m = 0.0;
    for (Eigen::Index i = 0; i < points.size(); ++i) m = std::max(m, std::abs(points[i]));
    return m;
}

double intra_ring_dmin(double r, int n) {
    if (n < 2) throw std::invalid_argument("intra_ring_dmin: a 1-point ring has no intra distance");
    if (r < 0) throw std::invalid_argument("intra_ring_dmin: negative radius");
    return std::sqrt(std::max(0.0, 2.0 * r * r - 2.0 * r * r * std::cos(kTwoPi / n)));
}

double min_inter_ring_phase(int n_l, int n_next, double delta_omega) {
    if (n_l < 1 || n_next < 1) throw std::invalid_argument("min_inter_ring_phase: ring sizes must be positive");
    // arccos(max cos(.)) equals the smallest |angle| wrapped to [-pi, pi].
    double best = M_PI;
    for (int k = 0; k < n_l; ++k) {
        for (int kh = 0; kh < n_next; ++kh) {
            const double a = kTwoPi * (static_cast<double>(k) / n_l - static_cast<double>(kh) / n_next) + delta_omega;
            best = std::min(best, std::abs(std::remainder(a, kTwoPi)));
        }
    }
    return best;
}

PhaseShift optimal_phase_shift(int n_l, int n_next) {
    if (n_l < 1 || n_next < 1) throw std::invalid_argument("optimal_phase_shift: ring sizes must be positive");
    const long long l = std::lcm(static_cast<long long>(n_l), static_cast<long long>(n_next));
    const double v = M_PI / static_cast<double>(l);
    return {v, v};
}

double next_ring_radius(double r_prev, int n_next, double phi_star, double d_target) {
    if (n_next < 2) throw std::invalid_argument("next_ring_radius: ring needs at least 2 points");
    if (!(d_target > 0)) throw std::invalid_argument("next_ring_radius: target distance must be positive");
    if (r_prev < 0) throw std::invalid_argument("next_ring_radius: negative radius");
    const double b1 = d_target / (2.0 * std::sin(M_PI / n_next));
    const double c = std::cos(phi_star);
    const double disc = r_prev * r_prev * (c * c - 1.0) + d_target * d_target;
    // A negative discriminant means the inter-ring constraint binds at no
    // radius; the intra-ring bound b1 is then the only candidate.
    const double b2 = r_prev * c + std::sqrt(std::max(0.0, disc));
    const double r = std::max(b1, b2);
    if (!(r > r_prev * (1.0 + 1e-9)) || !(r > 0))
        throw infeasible_error("next_ring_radius: no radius beyond the previous ring");
    return r;
}

ApskParams construct_apsk(const RingSpec& rings, double amplitude_bound) {
    rings.validate();
    if (!(amplitude_bound > 0)) throw std::invalid_argument("construct_apsk: bound must be positive");
    if (rings.order() < 2) throw std::invalid_argument("construct_apsk: need at least 2 points");

    const auto& n = rings.points_per_ring;
    const int L = rings.ring_count();
    std::vector<double> r(L, 0.0), w(L, 0.0);

    double d;     // target minimum distance in intermediate units
    int placed;   // index of the outermost ring already placed
    if (n[0] == 1) {
        // center point: the second ring carries the unit radius and the
        // distance target is min(chord of ring 2, center-to-ring distance)
        r[0] = 0.0;
        r[1] = 1.0;
        w[1] = w[0] + optimal_phase_shift(n[0], n[1]).delta_omega;
        d = std::min(intra_ring_dmin(1.0, n[1]), 1.0);
        placed = 1;
    } else {
        r[0] = 1.0;
        d = (n[0] >= 2) ? intra_ring_dmin(1.0, n[0]) : 0.0;
        placed = 0;
    }

    for (int l = placed; l + 1 < L; ++l) {
        const PhaseShift shift = optimal_phase_shift(n[l], n[l + 1]);
        w[l + 1] = w[l] + shift.delta_omega;
        r[l + 1] = next_ring_radius(r[l], n[l + 1], shift.phi, d);
    }

    const double scale = amplitude_bound / r[L - 1];
    for (auto& x : r) x *= scale;
    r[L - 1] = amplitude_bound;  // exact

    ApskParams p{rings, std::move(r), std::move(w), amplitude_bound};
    p.validate();
    return p;
}

Constellation realize(const ApskParams& params) {
    params.validate();
    Constellation c;
    c.amplitude_bound = params.amplitude_bound;
    c.params = params;
    c.points.resize(params.rings.order());
    Eigen::Index idx = 0;
    for (int l = 0; l < params.rings.ring_count(); ++l) {
        const int n = params.rings.points_per_ring[l];
        for (int k = 0; k < n; ++k) {
            const double angle = kTwoPi * k / n + params.phases[l];
            c.points[idx++] = std::polar(params.radii[l], angle);
        }
    }
    return c;
}

DistanceReport brute_force_dmin(const Constellation& c) {
    const int m = c.order();
    if (m < 2) throw std::invalid_argument("brute_force_dmin: need at least 2 points");

    DistanceReport rep;
    double best2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
        for (int j = i + 1; j < m; ++j) {
            const double d2 = std::norm(c.points[i] - c.points[j]);
            if (d2 < best2) {
                best2 = d2;
                rep.arg_pair = {i, j};
            }
        }
    }
    rep.d_min = std::sqrt(best2);

    if (c.params) {
        const auto& n = c.params->rings.points_per_ring;
        const int L = static_cast<int>(n.size());
        std::vector<int> offset(L + 1, 0);
        for (int l = 0; l < L; ++l) offset[l + 1] = offset[l] + n[l];

        for (int l = 0; l < L; ++l) {
            if (n[l] < 2) continue;
            double b2 = std::numeric_limits<double>::infinity();
            for (int i = offset[l]; i < offset[l + 1]; ++i)
                for (int j = i + 1; j < offset[l + 1]; ++j)
                    b2 = std::min(b2, std::norm(c.points[i] - c.points[j]));
            rep.per_ring_intra.push_back(std::sqrt(b2));
        }
        for (int l = 0; l + 1 < L; ++l) {
            double b2 = std::numeric_limits<double>::infinity();
            for (int i = offset[l]; i < offset[l + 1]; ++i)
                for (int j = offset[l + 1]; j < offset[l + 2]; ++j)
                    b2 = std::min(b2, std::norm(c.points[i] - c.points[j]));
            rep.inter_adjacent.push_back(std::sqrt(b2));
        }
    }
    return rep;
}

std::vector<std::vector<int>> enumerate_ring_partitions(int M, int max_rings, bool prune) {
    if (M < 2) throw std::invalid_argument("enumerate_ring_partitions: M must be >= 2");
    if (max_rings < 1) throw std::invalid_argument("enumerate_ring_partitions: max_rings must be >= 1");

    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    // Non-decreasing compositions of M; a size-1 ring only in first place.
    auto rec = [&](auto&& self, int remaining, int lo) -> void {
        if (remaining == 0) {
            out.push_back(cur);
            return;
        }
        if (static_cast<int>(cur.size()) == max_rings) return;
        for (int v = lo; v <= remaining; ++v) {
            cur.push_back(v);
            self(self, remaining - v, std::max(v, 2));
            cur.pop_back();
        }
    };
    rec(rec, M, 1);

    if (prune) {
        // Size-2 rings are dominated except as the lone BPSK ring.
        std::erase_if(out, [&](const std::vector<int>& p) {
            for (std::size_t l = 0; l < p.size(); ++l)
                if (p[l] == 2 && p.size() > 1) return true;
            return false;
        });
    }
    return out;
}

ApskDesign design_best_apsk(int M, double amplitude_bound, int max_rings) {
    if (M < 2) throw std::invalid_argument("design_best_apsk: M must be >= 2");
    if (!(amplitude_bound > 0)) throw std::invalid_argument("design_best_apsk: bound must be positive");

    const auto partitions = enumerate_ring_partitions(M, max_rings, true);
    const double tie = 1e-12 * amplitude_bound;

    bool found = false;
    ApskDesign best;
    std::vector<int> best_sizes;
    for (const auto& sizes : partitions) {
        RingSpec rs{sizes};
        ApskParams params;
        try {
            params = construct_apsk(rs, amplitude_bound);
        } catch (const infeasible_error&) {
            continue;
        }
        const Constellation c = realize(params);
        const DistanceReport rep = brute_force_dmin(c);

        bool better = false;
        if (!found || rep.d_min > best.report.d_min + tie) {
            better = true;
        } else if (rep.d_min > best.report.d_min - tie) {
            if (sizes.size() < best_sizes.size()) better = true;
            else if (sizes.size() == best_sizes.size() && sizes < best_sizes) better = true;
        }
        if (better) {
            best = {std::move(params), rep};
            best_sizes = sizes;
            found = true;
        }
    }
    if (!found) throw infeasible_error("design_best_apsk: no feasible ring partition");
    return best;
}

namespace {

std::vector<std::complex<double>> qam_layout(int M) {
    int w = 0, h = 0;
    bool cross = false;
    switch (M) {
        case 4: w = 2; h = 2; break;
        case 8: w = 4; h = 2; break;
        case 16: w = 4; h = 4; break;
        case 32: w = 6; h = 6; cross = true; break;
        case 64: w = 8; h = 8; break;
        default: throw std::invalid_argument("qam: unsupported order");
    }
    std::vector<std::complex<double>> points;
    for (int iy = 0; iy < h; ++iy) {
        for (int ix = 0; ix < w; ++ix) {
            const int x = 2 * ix - (w - 1);
            const int y = 2 * iy - (h - 1);
            if (cross && std::abs(x) == 5 && std::abs(y) == 5) continue;
            points.emplace_back(x, y);
        }
    }
    return points;
}

double min_pairwise_distance(const Eigen::VectorXcd& pts) {
    double best2 = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < pts.size(); ++i)
        for (Eigen::Index j = i + 1; j < pts.size(); ++j)
            best2 = std::min(best2, std::norm(pts[i] - pts[j]));
    return std::sqrt(best2);
}

/// Pairwise-swap descent on the label permutation, minimizing total Hamming
/// distance over all point pairs within 1.25x of the minimum distance.
void greedy_label_descent(const Eigen::VectorXcd& pts, std::vector<std::uint32_t>& labels) {
    const int m = static_cast<int>(pts.size());
    const double cutoff = 1.25 * min_pairwise_distance(pts) + 1e-12;
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if (std::abs(pts[i] - pts[j]) <= cutoff) pairs.emplace_back(i, j);

    auto cost = [&]() {
        int s = 0;
        for (const auto& [i, j] : pairs) s += std::popcount(labels[i] ^ labels[j]);
        return s;
    };

    int cur = cost();
    for (int pass = 0; pass < 200; ++pass) {
        bool improved = false;
        for (int i = 0; i < m; ++i) {
            for (int j = i + 1; j < m; ++j) {
                std::swap(labels[i], labels[j]);
                const int trial = cost();
                if (trial < cur) {
                    cur = trial;
                    improved = true;
                } else {
                    std::swap(labels[i], labels[j]);
                }
            }
        }
        if (!improved) break;
    }
}

/// Detect an axis-aligned rectangular grid; fills ix/iy/w/h on success.
bool detect_rect_grid(const Eigen::VectorXcd& pts, std::vector<int>& ix, std::vector<int>& iy, int& w, int& h) {
    const int m = static_cast<int>(pts.size());
    auto collect = [&](auto getter) {
        std::vector<double> vals;
        for (int i = 0; i < m; ++i) {
            const double v = getter(pts[i]);
            bool seen = false;
            for (double u : vals)
                if (std::abs(u - v) < 1e-9) { seen = true; break; }
            if (!seen) vals.push_back(v);
        }
        std::sort(vals.begin(), vals.end());
        return vals;
    };
    const auto xs = collect([](std::complex<double> p) { return p.real(); });
    const auto ys = collect([](std::complex<double> p) { return p.imag(); });
    w = static_cast<int>(xs.size());
    h = static_cast<int>(ys.size());
    if (w * h != m || !is_power_of_two(w) || !is_power_of_two(h)) return false;

    ix.assign(m, -1);
    iy.assign(m, -1);
    std::vector<bool> used(m, false);
    for (int i = 0; i < m; ++i) {
        for (int a = 0; a < w; ++a)
            if (std::abs(pts[i].real() - xs[a]) < 1e-9) ix[i] = a;
        for (int b = 0; b < h; ++b)
            if (std::abs(pts[i].imag() - ys[b]) < 1e-9) iy[i] = b;
        if (ix[i] < 0 || iy[i] < 0) return false;
        const int cell = iy[i] * w + ix[i];
        if (used[cell]) return false;
        used[cell] = true;
    }
    return true;
}

}  // namespace

Constellation assign_bit_labels(Constellation c) {
    const int m = c.order();
    if (!is_power_of_two(m) || m < 2)
        throw std::invalid_argument("assign_bit_labels: order must be a power of two");

    c.bit_map.assign(m, 0);
    if (!c.params) {
        std::vector<int> ix, iy;
        int w = 0, h = 0;
        if (detect_rect_grid(c.points, ix, iy, w, h)) {
            const int bits_y = int_log2(h);
            for (int i = 0; i < m; ++i)
                c.bit_map[i] = (gray_code(ix[i]) << bits_y) | gray_code(iy[i]);
            return c;
        }
    }
    // Gray walk along the point order, then pairwise-swap refinement.
    for (int i = 0; i < m; ++i) c.bit_map[i] = gray_code(static_cast<std::uint32_t>(i));
    greedy_label_descent(c.points, c.bit_map);
    return c;
}

Constellation rescale_to_power(Constellation c, double bound) {
    if (!(bound > 0)) throw std::invalid_argument("rescale_to_power: bound must be positive");
    const double s = bound / std::sqrt(c.mean_energy());
    c.points *= s;
    c.amplitude_bound = c.peak_amplitude();
    if (c.params) {
        for (auto& r : c.params->radii) r *= s;
        c.params->amplitude_bound = c.params->radii.back();
    }
    return c;
}

Constellation baseline_constellation(BaselineKind kind, int M, ScaleConstraint constraint, double bound) {
    if (!(bound > 0)) throw std::invalid_argument("baseline_constellation: bound must be positive");

    Constellation c;
    if (kind == BaselineKind::Psk) {
        if (M < 2) throw std::invalid_argument("psk: M must be >= 2");
        // Unit-circle points: the amplitude and power scalings coincide.
        ApskParams p{RingSpec{{M}}, {bound}, {0.0}, bound};
        c = realize(p);
    } else {
        const auto layout = qam_layout(M);
        c.points.resize(M);
        for (int i = 0; i < M; ++i) c.points[i] = layout[i];
        double scale;
        if (constraint == ScaleConstraint::Amplitude) {
            scale = bound / c.peak_amplitude();
        } else {
            scale = bound / std::sqrt(c.mean_energy());
        }
        c.points *= scale;
        c.amplitude_bound = c.peak_amplitude();
    }
    if (is_power_of_two(M)) c = assign_bit_labels(std::move(c));
    return c;
}

}  // namespace ampcon
