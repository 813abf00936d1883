#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <queue>
#include <sstream>
#include <vector>

#include "hmftrace/error.hpp"

namespace hmf::quad {

/// Nodes and weights of a quadrature rule.
struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1]. Cached, thread-safe.
const Rule& gauss_legendre(int n);

/// Composite Gauss-Legendre rule of the given order over consecutive panels [breaks[i], breaks[i+1]].
Rule composite_gauss_legendre(const std::vector<double>& breaks, int order);

/// Panel breakpoints on [a, b], geometrically graded toward a, then uniform with spacing at most `width`.
std::vector<double> graded_breaks(double a, double b, double first, double width);

template <class T>
struct Result {
    T value{};
    double error = 0.0;
    int evaluations = 0;
};

struct Options {
    double abs_tol = 1e-14;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
    bool throw_on_failure = true;
};

namespace detail {

inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
    double a, b;
    T value;
    double error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class T, class F>
Segment<T> kronrod15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    T fv[15];
    fv[7] = f(c);
    for (int j = 0; j < 7; ++j) {
        fv[j] = f(c - h * kXgk[j]);
        fv[14 - j] = f(c + h * kXgk[j]);
    }
    T k = fv[7] * kWgk[7];
    T g = fv[7] * kWg[3];
    for (int j = 0; j < 7; ++j) {
        k += (fv[j] + fv[14 - j]) * kWgk[j];
        if (j % 2 == 1) g += (fv[j] + fv[14 - j]) * kWg[j / 2];
    }
    const T mean = k * 0.5;
    double asc = kWgk[7] * std::abs(fv[7] - mean);
    for (int j = 0; j < 7; ++j)
        asc += kWgk[j] * (std::abs(fv[j] - mean) + std::abs(fv[14 - j] - mean));
    asc *= std::abs(h);
    double err = std::abs((k - g) * h);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    return {a, b, k * h, err};
}

}  // namespace detail

/// Globally adaptive 15-point Gauss-Kronrod integration of f over [a, b].
template <class T, class F>
Result<T> integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result<T> out;
    if (a == b) return out;
    std::priority_queue<detail::Segment<T>> heap;
    heap.push(detail::kronrod15<T>(f, a, b));
    out.evaluations = 15;
    T total = heap.top().value;
    double err = heap.top().error;
    int intervals = 1;
    while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (intervals >= opt.max_intervals) {
            if (opt.throw_on_failure) {
                std::ostringstream msg;
                msg << "adaptive quadrature did not converge on [" << a << ", " << b
                    << "], error estimate " << err;
                fail(ErrorKind::Numeric, msg.str());
            }
            break;
        }
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        auto left = detail::kronrod15<T>(f, worst.a, mid);
        auto right = detail::kronrod15<T>(f, mid, worst.b);
        out.evaluations += 30;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++intervals;
    }
    // Re-sum in interval order so the result does not carry update round-off.
    std::vector<detail::Segment<T>> segs;
    segs.reserve(heap.size());
    double err_sum = 0.0;
    while (!heap.empty()) {
        segs.push_back(heap.top());
        heap.pop();
    }
    std::sort(segs.begin(), segs.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    T sum{};
    for (const auto& s : segs) {
        sum += s.value;
        err_sum += s.error;
    }
    out.value = sum;
    out.error = err_sum;
    return out;
}

/// Iterated adaptive integration over the box [lo, hi]; f receives the full coordinate vector.
template <class T, class F>
Result<T> integrate_box(F&& f, const std::vector<double>& lo, const std::vector<double>& hi,
                        const Options& opt = {}) {
    const std::size_t dim = lo.size();
    std::vector<double> x(dim, 0.0);
    double inner_err = 0.0;
    int evals = 0;
    std::function<T(std::size_t)> level = [&](std::size_t d) -> T {
        auto g = [&](double t) -> T {
            x[d] = t;
            if (d + 1 == dim) {
                ++evals;
                return f(x);
            }
            return level(d + 1);
        };
        Options o = opt;
        if (d + 1 < dim) o.rel_tol = opt.rel_tol * 0.1;
        auto r = integrate<T>(g, lo[d], hi[d], o);
        if (d > 0) inner_err = std::max(inner_err, r.error);
        return r.value;
    };
    if (dim == 0) return {f(x), 0.0, 1};
    Options o = opt;
    auto g0 = [&](double t) -> T {
        x[0] = t;
        if (dim == 1) {
            ++evals;
            return f(x);
        }
        return level(1);
    };
    auto r = integrate<T>(g0, lo[0], hi[0], o);
    double vol = 1.0;
    for (std::size_t d = 0; d < dim; ++d) vol *= std::abs(hi[d] - lo[d]);
    r.error += inner_err * vol / std::max(std::abs(hi[0] - lo[0]), 1e-300);
    r.evaluations = evals;
    return r;
}

/// Trapezoid rule for a 1-periodic integrand on [0, 1) with n equally spaced nodes.
template <class T, class F>
T periodic_trapezoid(F&& f, int n) {
    T sum{};
    for (int j = 0; j < n; ++j) sum += f(static_cast<double>(j) / n);
    return sum / static_cast<double>(n);
}

}  // namespace hmf::quad
