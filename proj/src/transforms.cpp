#include "hmftrace/transforms.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "hmftrace/error.hpp"
#include "hmftrace/parallel.hpp"

namespace hmf {

namespace {

constexpr double kPi = std::numbers::pi;
// g samples: composite Gauss-Legendre on [0, U], resolving cos(r u) for r up to about 1700.
constexpr int kGPanels = 160;
constexpr int kGOrder = 20;
constexpr int kPsiOrder = 48;

double phi(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

// One-dimensional factor of Q; t = w + tau^2 removes the inverse square root.
double q_factor(const TestFunction& psi, int k, double w, double tol) {
    const double lo = psi.support_lower(k), hi = psi.support_upper(k);
    if (w >= hi) return 0.0;
    const double a = std::sqrt(std::max(lo - w, 0.0));
    const double b = std::sqrt(hi - w);
    auto f = [&](double tau) { return 2.0 * psi.factor(k, w + tau * tau); };
    quad::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = 1e-16;
    return quad::integrate<double>(f, a, b, opt).value;
}

void check_degree(int expected, Eigen::Index got) {
    if (got != expected) {
        std::ostringstream msg;
        msg << "argument has " << got << " coordinates, test function has " << expected;
        fail(ErrorKind::Domain, msg.str());
    }
}

}  // namespace

TestFunction TestFunction::bump(Eigen::VectorXd centers, Eigen::VectorXd widths, double amplitude) {
    if (centers.size() != widths.size() || centers.size() == 0)
        fail(ErrorKind::Domain, "bump needs matching nonempty centers and widths");
    for (Eigen::Index k = 0; k < widths.size(); ++k) {
        if (!(widths[k] > 0)) fail(ErrorKind::Domain, "bump widths must be positive");
        if (!(centers[k] + widths[k] > 0)) fail(ErrorKind::Domain, "bump support must meet [0, inf)");
    }
    return TestFunction{std::move(centers), std::move(widths), amplitude};
}

TestFunction TestFunction::standard(int n) {
    return bump(Eigen::VectorXd::Constant(n, 4.5), Eigen::VectorXd::Constant(n, 4.5));
}

TestFunction TestFunction::zero(int n) {
    return bump(Eigen::VectorXd::Constant(n, 4.5), Eigen::VectorXd::Constant(n, 4.5), 0.0);
}

double TestFunction::factor(int k, double t) const {
    if (t < 0) return 0.0;
    return phi((t - centers[k]) / widths[k]);
}

double TestFunction::operator()(const Eigen::VectorXd& t) const {
    check_degree(degree(), t.size());
    double v = amplitude;
    for (int k = 0; k < degree() && v != 0.0; ++k) v *= factor(k, t[k]);
    return v;
}

double TestFunction::support_lower(int k) const { return std::max(0.0, centers[k] - widths[k]); }

double TestFunction::support_upper(int k) const { return centers[k] + widths[k]; }

TransformTriple::TransformTriple(TestFunction psi, double tolerance) : psi_(std::move(psi)), tol_(tolerance) {
    if (!(tol_ > 0)) fail(ErrorKind::Domain, "transform tolerance must be positive");
    const int n = psi_.degree();
    axes_.resize(n);
    for (int k = 0; k < n; ++k) {
        // Coordinates with the same bump share their samples.
        for (int j = 0; j < k; ++j)
            if (psi_.centers[j] == psi_.centers[k] && psi_.widths[j] == psi_.widths[k]) axes_[k] = axes_[j];
        if (axes_[k]) continue;
        auto axis = std::make_shared<Axis>();
        const double U = g_support(k);
        std::vector<double> breaks(kGPanels + 1);
        for (int i = 0; i <= kGPanels; ++i) breaks[i] = U * i / kGPanels;
        axis->nodes = quad::composite_gauss_legendre(breaks, kGOrder);
        const auto& u = axis->nodes.nodes;
        axis->g = parallel_map<double>(u.size(), [&](std::size_t i) { return g1(k, u[i]); });
        axes_[k] = axis;
    }
}

double TransformTriple::g_support(int k) const {
    return 2.0 * std::asinh(0.5 * std::sqrt(psi_.support_upper(k)));
}

double TransformTriple::Q1(int k, double w) const { return q_factor(psi_, k, w, tol_); }

double TransformTriple::g1(int k, double u) const {
    const double s = std::sinh(0.5 * u);
    return Q1(k, 4.0 * s * s);
}

double TransformTriple::h1(int k, double r) const {
    const Axis& ax = *axes_[k];
    const auto& u = ax.nodes.nodes;
    const auto& w = ax.nodes.weights;
    double sum = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) sum += w[i] * ax.g[i] * std::cos(r * u[i]);
    return 2.0 * sum;
}

double TransformTriple::Q(const Eigen::VectorXd& w) const {
    check_degree(degree(), w.size());
    double v = psi_.amplitude;
    for (int k = 0; k < degree() && v != 0.0; ++k) v *= Q1(k, w[k]);
    return v;
}

double TransformTriple::g(const Eigen::VectorXd& u) const {
    check_degree(degree(), u.size());
    double v = psi_.amplitude;
    for (int k = 0; k < degree() && v != 0.0; ++k) v *= g1(k, u[k]);
    return v;
}

double TransformTriple::h(const Eigen::VectorXd& r) const {
    check_degree(degree(), r.size());
    double v = psi_.amplitude;
    for (int k = 0; k < degree() && v != 0.0; ++k) v *= h1(k, r[k]);
    return v;
}

HGrid TransformTriple::h_grid(double r_max, double panel, int order) const {
    if (!(r_max > 0 && panel > 0)) fail(ErrorKind::Domain, "h grid needs positive extent and panel width");
    HGrid grid;
    grid.amplitude = psi_.amplitude;
    const int panels = static_cast<int>(std::ceil(r_max / panel));
    std::vector<double> breaks(panels + 1);
    for (int i = 0; i <= panels; ++i) breaks[i] = r_max * i / panels;
    const quad::Rule rule = quad::composite_gauss_legendre(breaks, order);
    for (int k = 0; k < degree(); ++k) {
        std::vector<double> vals;
        int shared = -1;
        for (int j = 0; j < k; ++j)
            if (axes_[j] == axes_[k]) shared = j;
        if (shared >= 0) {
            vals = grid.values[shared];
        } else {
            vals = parallel_map<double>(rule.nodes.size(), [&](std::size_t i) { return h1(k, rule.nodes[i]); });
        }
        // Mass of |h| on the last tenth of the grid, a proxy for what lies beyond r_max.
        double tail = 0.0;
        for (std::size_t i = rule.nodes.size() * 9 / 10; i < rule.nodes.size(); ++i)
            tail += rule.weights[i] * std::abs(vals[i]);
        grid.tail += tail;
        grid.rules.push_back(rule);
        grid.values.push_back(std::move(vals));
    }
    return grid;
}

double Q_of(const TestFunction& psi, const Eigen::VectorXd& w) {
    check_degree(psi.degree(), w.size());
    double v = psi.amplitude;
    for (int k = 0; k < psi.degree() && v != 0.0; ++k) v *= q_factor(psi, k, w[k], 1e-12);
    return v;
}

double g_of(const TestFunction& psi, const Eigen::VectorXd& u) {
    check_degree(psi.degree(), u.size());
    Eigen::VectorXd w(u.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        const double s = std::sinh(0.5 * u[k]);
        w[k] = 4.0 * s * s;
    }
    return Q_of(psi, w);
}

Complex h_of(const TestFunction& psi, const Eigen::VectorXd& r) {
    check_degree(psi.degree(), r.size());
    if (psi.is_zero()) return 0.0;
    return TransformTriple(psi).h(r);
}

double g_from_h(const HGrid& grid, const Eigen::VectorXd& u, double tol) {
    check_degree(grid.degree(), u.size());
    if (grid.amplitude == 0.0) return 0.0;
    double v = grid.amplitude, scale = std::abs(grid.amplitude);
    for (int k = 0; k < grid.degree(); ++k) {
        const auto& rule = grid.rules[k];
        const auto& h = grid.values[k];
        double sum = 0.0, mass = 0.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            sum += rule.weights[i] * h[i] * std::cos(rule.nodes[i] * u[k]);
            mass += rule.weights[i] * std::abs(h[i]);
        }
        v *= sum / kPi;
        scale *= std::max(mass / kPi, 1.0);
    }
    const double tail = scale * grid.tail / kPi;
    if (tail > tol) {
        std::ostringstream msg;
        msg << "h grid too short for inversion: tail estimate " << tail << " exceeds " << tol;
        fail(ErrorKind::Accuracy, msg.str());
    }
    return v;
}

quad::Result<double> psi_from_Q(const QFunction& q, const Eigen::VectorXd& t, const Eigen::VectorXd& support_upper,
                                const Eigen::VectorXd& step) {
    const int n = static_cast<int>(t.size());
    if (support_upper.size() != n || step.size() != n) fail(ErrorKind::Domain, "psi_from_Q: dimension mismatch");
    for (int k = 0; k < n; ++k)
        if (t[k] >= support_upper[k]) return {0.0, 0.0, 0};
    const quad::Rule& gl = quad::gauss_legendre(kPsiOrder);

    // Mixed central difference of Q at w with steps scaled by `mult`.
    auto mixed = [&](const Eigen::VectorXd& w, double mult) {
        double sum = 0.0;
        Eigen::VectorXd x(n);
        for (int mask = 0; mask < (1 << n); ++mask) {
            int sign = 1;
            for (int k = 0; k < n; ++k) {
                const bool plus = (mask >> k) & 1;
                x[k] = w[k] + (plus ? 1.0 : -1.0) * mult * step[k];
                if (!plus) sign = -sign;
            }
            sum += sign * q(x);
        }
        double denom = 1.0;
        for (int k = 0; k < n; ++k) denom *= 2.0 * mult * step[k];
        return sum / denom;
    };

    // Tensor Gauss-Legendre in tau_k in [0, sqrt(hi_k - t_k)], w_k = t_k + tau_k^2.
    std::vector<double> b(n);
    for (int k = 0; k < n; ++k) b[k] = std::sqrt(support_upper[k] - t[k]);
    std::size_t total = 1;
    for (int k = 0; k < n; ++k) total *= kPsiOrder;
    auto terms = parallel_map<std::array<double, 2>>(total, [&](std::size_t idx) {
        Eigen::VectorXd w(n);
        double weight = 1.0;
        std::size_t rest = idx;
        for (int k = 0; k < n; ++k) {
            const int j = static_cast<int>(rest % kPsiOrder);
            rest /= kPsiOrder;
            const double tau = 0.5 * b[k] * (gl.nodes[j] + 1.0);
            w[k] = t[k] + tau * tau;
            // dw / sqrt(w - t) = 2 dtau
            weight *= b[k] * gl.weights[j];
        }
        return std::array<double, 2>{weight * mixed(w, 1.0), weight * mixed(w, 2.0)};
    });
    std::vector<double> fine(total), coarse(total);
    for (std::size_t i = 0; i < total; ++i) {
        fine[i] = terms[i][0];
        coarse[i] = terms[i][1];
    }
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double norm = sign / std::pow(kPi, n);
    const double v1 = norm * pairwise_sum(fine);
    const double v2 = norm * pairwise_sum(coarse);
    // Central differences are second order: the h and 2h results differ by about three times the error.
    return {v1, std::abs(v1 - v2) / 3.0, static_cast<int>(total) * (2 << n)};
}

double psi_from_Q(const TransformTriple& triple, const Eigen::VectorXd& t) {
    const TestFunction& psi = triple.source();
    check_degree(psi.degree(), t.size());
    if (psi.is_zero()) return 0.0;
    const int n = psi.degree();
    Eigen::VectorXd hi(n), step(n);
    for (int k = 0; k < n; ++k) {
        hi[k] = psi.support_upper(k);
        step[k] = 1e-3 * psi.widths[k];
    }
    auto r = psi_from_Q([&](const Eigen::VectorXd& w) { return triple.Q(w); }, t, hi, step);
    if (r.error > 0.1 * std::abs(r.value) + 1e-6 * std::abs(psi.amplitude)) {
        std::ostringstream msg;
        msg << "psi_from_Q: differentiation error " << r.error << " dominates value " << r.value;
        fail(ErrorKind::Accuracy, msg.str());
    }
    return r.value;
}

}  // namespace hmf
