#pragma once

// Uniform grids, grid functions and the fourth-order finite-difference /
// quadrature kernels that every higher-level module builds on.
//
// Conventions used throughout:
//   * grids are uniform, closed intervals [a,b] with n >= 5 nodes,
//     x_i = a + i*h, h = (b-a)/(n-1);
//   * derivative stencils are 4th order in the interior and switch to
//     one-sided stencils of matching order at the boundary, so no ghost
//     nodes are ever required;
//   * cumulative integrals use a composite 4-point (cubic) Newton-Cotes
//     rule per interval, exact on cubic polynomials and O(h^4) globally.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace susyforge {

struct Grid {
    double a = 0.0;
    double b = 1.0;
    std::size_t n = 0;
    double h = 0.0;

    double x(std::size_t i) const { return a + static_cast<double>(i) * h; }
    std::size_t size() const { return n; }

    // Nearest node index for a point that is supposed to coincide with a
    // node (initial-condition abscissae, mask edges). Throws if x lies
    // farther than `tol` (relative) from every node.
    std::size_t index_of(double xq, double tol = 1e-9) const {
        double t = (xq - a) / h;
        double r = std::round(t);
        std::size_t i = static_cast<std::size_t>(std::clamp<double>(r, 0.0, static_cast<double>(n - 1)));
        if (std::abs(x(i) - xq) > tol * (1.0 + std::abs(xq)))
            throw std::invalid_argument("point " + std::to_string(xq) + " does not coincide with a grid node");
        return i;
    }
};

inline bool operator==(const Grid& p, const Grid& q) {
    return p.a == q.a && p.b == q.b && p.n == q.n;
}
inline bool operator!=(const Grid& p, const Grid& q) { return !(p == q); }

inline Grid make_grid(double a, double b, std::size_t n) {
    if (!std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("grid endpoints must be finite");
    if (!(b > a))
        throw std::invalid_argument("grid requires b > a");
    if (n < 5)
        throw std::invalid_argument("grid requires at least 5 nodes");
    Grid g;
    g.a = a;
    g.b = b;
    g.n = n;
    g.h = (b - a) / static_cast<double>(n - 1);
    return g;
}

// A scalar function sampled on a grid.
struct GridFn {
    Grid grid;
    std::vector<double> values;

    GridFn() = default;
    explicit GridFn(const Grid& g) : grid(g), values(g.n, 0.0) {}
    GridFn(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (values.size() != g.n)
            throw std::invalid_argument("value vector length does not match grid");
    }

    std::size_t size() const { return values.size(); }
    double x(std::size_t i) const { return grid.x(i); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
};

inline void require_same_grid(const GridFn& f, const GridFn& g, const char* what) {
    if (f.grid != g.grid)
        throw std::invalid_argument(std::string(what) + ": operands live on different grids");
}

// Sample fn(x) on every node of g.
template <class F>
GridFn sample(const Grid& g, F&& fn) {
    GridFn out(g);
    for (std::size_t i = 0; i < g.n; ++i) out.values[i] = fn(g.x(i));
    return out;
}

template <class F>
GridFn map(const GridFn& f, F&& fn) {
    GridFn out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = fn(f.values[i]);
    return out;
}

template <class Op>
GridFn zip(const GridFn& f, const GridFn& g, Op&& op) {
    require_same_grid(f, g, "zip");
    GridFn out(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) out.values[i] = op(f.values[i], g.values[i]);
    return out;
}

// First derivative, 4th order. Interior: centred 5-point stencil; the two
// nodes at each end use one-sided 5-point stencils of the same order.
inline GridFn deriv1(const GridFn& f) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("deriv1 requires at least 5 nodes");
    const double h = f.grid.h;
    const auto& v = f.values;
    GridFn out(f.grid);
    auto& d = out.values;
    const double s = 1.0 / (12.0 * h);

    d[0] = (-25.0 * v[0] + 48.0 * v[1] - 36.0 * v[2] + 16.0 * v[3] - 3.0 * v[4]) * s;
    d[1] = (-3.0 * v[0] - 10.0 * v[1] + 18.0 * v[2] - 6.0 * v[3] + v[4]) * s;
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) * s;
    d[n - 2] = (3.0 * v[n - 1] + 10.0 * v[n - 2] - 18.0 * v[n - 3] + 6.0 * v[n - 4] - v[n - 5]) * s;
    d[n - 1] = (25.0 * v[n - 1] - 48.0 * v[n - 2] + 36.0 * v[n - 3] - 16.0 * v[n - 4] + 3.0 * v[n - 5]) * s;
    return out;
}

// Second derivative, 4th order in the interior. Boundary rows use 6-point
// one-sided stencils (exact through degree 5); with exactly 5 nodes they
// fall back to the 5-point variants, still exact through degree 4.
inline GridFn deriv2(const GridFn& f) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("deriv2 requires at least 5 nodes");
    const double h = f.grid.h;
    const auto& v = f.values;
    GridFn out(f.grid);
    auto& d = out.values;
    const double s = 1.0 / (12.0 * h * h);

    if (n >= 6) {
        d[0] = (45.0 * v[0] - 154.0 * v[1] + 214.0 * v[2] - 156.0 * v[3] + 61.0 * v[4] - 10.0 * v[5]) * s;
        d[1] = (10.0 * v[0] - 15.0 * v[1] - 4.0 * v[2] + 14.0 * v[3] - 6.0 * v[4] + v[5]) * s;
        d[n - 2] = (10.0 * v[n - 1] - 15.0 * v[n - 2] - 4.0 * v[n - 3] + 14.0 * v[n - 4] - 6.0 * v[n - 5] + v[n - 6]) * s;
        d[n - 1] = (45.0 * v[n - 1] - 154.0 * v[n - 2] + 214.0 * v[n - 3] - 156.0 * v[n - 4] + 61.0 * v[n - 5] - 10.0 * v[n - 6]) * s;
    } else {
        d[0] = (35.0 * v[0] - 104.0 * v[1] + 114.0 * v[2] - 56.0 * v[3] + 11.0 * v[4]) * s;
        d[1] = (11.0 * v[0] - 20.0 * v[1] + 6.0 * v[2] + 4.0 * v[3] - v[4]) * s;
        d[n - 2] = (11.0 * v[n - 1] - 20.0 * v[n - 2] + 6.0 * v[n - 3] + 4.0 * v[n - 4] - v[n - 5]) * s;
        d[n - 1] = (35.0 * v[n - 1] - 104.0 * v[n - 2] + 114.0 * v[n - 3] - 56.0 * v[n - 4] + 11.0 * v[n - 5]) * s;
    }
    for (std::size_t i = 2; i + 2 < n; ++i)
        d[i] = (-v[i - 2] + 16.0 * v[i - 1] - 30.0 * v[i] + 16.0 * v[i + 1] - v[i + 2]) * s;
    return out;
}

// Cumulative integral C(x_j) = int_{x_anchor}^{x_j} f dt via a composite
// cubic Newton-Cotes rule: every interval is integrated with the 4-point
// rule built from the interpolating cubic through the nearest 4 nodes.
inline GridFn cumint(const GridFn& f, std::size_t anchor = 0) {
    const std::size_t n = f.size();
    if (n < 5) throw std::invalid_argument("cumint requires at least 5 nodes");
    if (anchor >= n) throw std::invalid_argument("cumint anchor out of range");
    const double h = f.grid.h;
    const auto& v = f.values;

    std::vector<double> prefix(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double seg;
        if (i == 0)
            seg = h * (9.0 * v[0] + 19.0 * v[1] - 5.0 * v[2] + v[3]) / 24.0;
        else if (i + 2 >= n)
            seg = h * (v[n - 4] - 5.0 * v[n - 3] + 19.0 * v[n - 2] + 9.0 * v[n - 1]) / 24.0;
        else
            seg = h * (-v[i - 1] + 13.0 * v[i] + 13.0 * v[i + 1] - v[i + 2]) / 24.0;
        acc += seg;
        prefix[i + 1] = acc;
    }

    GridFn out(f.grid);
    const double base = prefix[anchor];
    for (std::size_t i = 0; i < n; ++i) out.values[i] = prefix[i] - base;
    return out;
}

// Cubic (4-point Lagrange) off-node evaluation. The window is the 4 nodes
// surrounding x, clamped at the boundary.
inline double interp_cubic(const GridFn& f, double xq) {
    const Grid& g = f.grid;
    const double slack = 1e-12 * (1.0 + std::abs(g.a) + std::abs(g.b));
    if (xq < g.a - slack || xq > g.b + slack)
        throw std::domain_error("interp_cubic: point " + std::to_string(xq) + " outside grid domain");
    double t = (xq - g.a) / g.h;
    auto cell = static_cast<long long>(std::floor(t));
    long long w = std::clamp<long long>(cell - 1, 0, static_cast<long long>(g.n) - 4);
    double u = t - static_cast<double>(w);
    const auto& v = f.values;
    const std::size_t k = static_cast<std::size_t>(w);
    const double l0 = -(u - 1.0) * (u - 2.0) * (u - 3.0) / 6.0;
    const double l1 = u * (u - 2.0) * (u - 3.0) / 2.0;
    const double l2 = -u * (u - 1.0) * (u - 3.0) / 2.0;
    const double l3 = u * (u - 1.0) * (u - 2.0) / 6.0;
    return l0 * v[k] + l1 * v[k + 1] + l2 * v[k + 2] + l3 * v[k + 3];
}

// Resample a tabulated function given on arbitrary strictly increasing
// abscissae onto a uniform grid, using a sliding 4-point Lagrange window.
inline GridFn resample_cubic(const std::vector<double>& xs, const std::vector<double>& vs, const Grid& g) {
    if (xs.size() != vs.size() || xs.size() < 4)
        throw std::invalid_argument("resample_cubic: need at least 4 samples with matching lengths");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
        if (!(xs[i] < xs[i + 1]))
            throw std::invalid_argument("resample_cubic: abscissae must be strictly increasing");
    const double slack = 1e-12 * (1.0 + std::abs(xs.front()) + std::abs(xs.back()));
    if (g.a < xs.front() - slack || g.b > xs.back() + slack)
        throw std::invalid_argument("resample_cubic: grid domain exceeds the tabulated range");

    GridFn out(g);
    for (std::size_t i = 0; i < g.n; ++i) {
        const double xq = g.x(i);
        auto it = std::upper_bound(xs.begin(), xs.end(), xq);
        long long cell = std::clamp<long long>(static_cast<long long>(it - xs.begin()) - 1, 0,
                                               static_cast<long long>(xs.size()) - 2);
        long long w = std::clamp<long long>(cell - 1, 0, static_cast<long long>(xs.size()) - 4);
        double num = 0.0;
        for (int j = 0; j < 4; ++j) {
            double lj = 1.0;
            for (int m = 0; m < 4; ++m) {
                if (m == j) continue;
                lj *= (xq - xs[w + m]) / (xs[w + j] - xs[w + m]);
            }
            num += lj * vs[w + j];
        }
        out.values[i] = num;
    }
    return out;
}

// Sup norm of f-g over an inclusive index window (defaults to the whole
// grid). Non-finite entries participate, so overflow sentinels are caught
// unless they are masked out.
inline double sup_diff(const GridFn& f, const GridFn& g, std::size_t lo, std::size_t hi) {
    require_same_grid(f, g, "sup_diff");
    if (lo > hi || hi >= f.size()) throw std::invalid_argument("sup_diff: bad index window");
    double m = 0.0;
    for (std::size_t i = lo; i <= hi; ++i)
        m = std::max(m, std::abs(f.values[i] - g.values[i]));
    return m;
}

inline double sup_diff(const GridFn& f, const GridFn& g) {
    return sup_diff(f, g, 0, f.size() - 1);
}

inline double sup_abs(const GridFn& f, std::size_t lo, std::size_t hi) {
    if (lo > hi || hi >= f.size()) throw std::invalid_argument("sup_abs: bad index window");
    double m = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, std::abs(f.values[i]));
    return m;
}

inline double sup_abs(const GridFn& f) { return sup_abs(f, 0, f.size() - 1); }

// Index window [first node >= xlo, last node <= xhi].
inline std::pair<std::size_t, std::size_t> index_window(const Grid& g, double xlo, double xhi) {
    if (!(xlo <= xhi)) throw std::invalid_argument("index_window: xlo > xhi");
    double tl = (xlo - g.a) / g.h;
    double th = (xhi - g.a) / g.h;
    long long lo = std::max<long long>(0, static_cast<long long>(std::ceil(tl - 1e-9)));
    long long hi = std::min<long long>(static_cast<long long>(g.n) - 1, static_cast<long long>(std::floor(th + 1e-9)));
    if (lo > hi) throw std::invalid_argument("index_window: empty window");
    return {static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

inline double sup_diff_x(const GridFn& f, const GridFn& g, double xlo, double xhi) {
    auto [lo, hi] = index_window(f.grid, xlo, xhi);
    return sup_diff(f, g, lo, hi);
}

inline double sup_abs_x(const GridFn& f, double xlo, double xhi) {
    auto [lo, hi] = index_window(f.grid, xlo, xhi);
    return sup_abs(f, lo, hi);
}

}  // namespace susyforge
