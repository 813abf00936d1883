#include "hmftrace/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace hmf::quad {

namespace {

Rule build_gauss_legendre(int n) {
    Rule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (x * p0 - p1) / (x * x - 1.0);
            const double dx = p0 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (x * p0 - p1) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

const Rule& gauss_legendre(int n) {
    if (n < 1) fail(ErrorKind::Domain, "Gauss-Legendre order must be positive");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<Rule>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<Rule>(build_gauss_legendre(n));
    return *slot;
}

Rule composite_gauss_legendre(const std::vector<double>& breaks, int order) {
    const Rule& base = gauss_legendre(order);
    Rule out;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double c = 0.5 * (breaks[p] + breaks[p + 1]);
        const double h = 0.5 * (breaks[p + 1] - breaks[p]);
        for (int j = 0; j < order; ++j) {
            out.nodes.push_back(c + h * base.nodes[j]);
            out.weights.push_back(h * base.weights[j]);
        }
    }
    return out;
}

std::vector<double> graded_breaks(double a, double b, double first, double width) {
    std::vector<double> br{a};
    double step = first;
    while (br.back() < b) {
        const double next = std::min(b, br.back() + std::min(step, width));
        if (b - next < 0.25 * std::min(step, width)) {
            br.push_back(b);
            break;
        }
        br.push_back(next);
        step *= 2.0;
    }
    return br;
}

}  // namespace hmf::quad
