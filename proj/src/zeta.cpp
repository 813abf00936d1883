#include "hmftrace/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "hmftrace/error.hpp"
#include "hmftrace/parallel.hpp"
#include "hmftrace/quadrature.hpp"
#include "hmftrace/specfun.hpp"

namespace hmf {

using std::numbers::pi;

namespace {

// exp(-pi * kThetaCut) ~ 1e-21: terms beyond the ellipsoid are negligible.
constexpr double kThetaCut = 48.0 / pi;

void check_context_shape(const ZetaContext& ctx) {
    if (ctx.multipliers.degree() != ctx.degree()) fail(ErrorKind::Domain, "multiplier and lattice degrees differ");
    if (ctx.m.size() != ctx.degree() - 1) fail(ErrorKind::Domain, "character index must have n-1 entries");
}

// Fincke-Pohst enumeration of c != 0 with c^T G c <= bound.
void enumerate_ellipsoid(const Eigen::MatrixXd& gram, double bound,
                         const std::function<void(const Eigen::VectorXi&)>& f) {
    const int n = static_cast<int>(gram.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) fail(ErrorKind::Numeric, "Gram matrix is not positive definite");
    const Eigen::MatrixXd R = llt.matrixU();
    Eigen::VectorXi c = Eigen::VectorXi::Zero(n);
    std::function<void(int, double)> level = [&](int i, double remaining) {
        double center = 0.0;
        for (int j = i + 1; j < n; ++j) center -= R(i, j) * c[j];
        center /= R(i, i);
        const double radius = std::sqrt(std::max(remaining, 0.0)) / R(i, i);
        const int lo = static_cast<int>(std::ceil(center - radius - 1e-12));
        const int hi = static_cast<int>(std::floor(center + radius + 1e-12));
        for (int v = lo; v <= hi; ++v) {
            c[i] = v;
            const double d = R(i, i) * (v - center);
            const double rest = remaining - d * d;
            if (rest < -1e-12 * bound) continue;
            if (i == 0) {
                if (!c.isZero()) f(c);
            } else {
                level(i - 1, rest);
            }
        }
        c[i] = 0;
    };
    level(n - 1, bound);
}

Eigen::MatrixXd weighted_gram(const EmbeddedLattice& lattice, const Eigen::VectorXd& weights) {
    return lattice.basis.transpose() * weights.asDiagonal() * lattice.basis;
}

// Minimum over nonzero l of sum_k weights_k l_k^2.
double shortest_weighted(const EmbeddedLattice& lattice, const Eigen::VectorXd& weights) {
    const Eigen::MatrixXd gram = weighted_gram(lattice, weights);
    double best = gram.diagonal().minCoeff();
    enumerate_ellipsoid(gram, best, [&](const Eigen::VectorXi& c) {
        const Eigen::VectorXd cd = c.cast<double>();
        best = std::min(best, cd.dot(gram * cd));
    });
    return best;
}

// Orbit representatives in the fundamental cell, with log|Nl| and multiplier coordinates.
struct OrbitTable {
    double log_norm_max = 0.0;
    std::vector<double> log_norm;
    std::vector<Eigen::VectorXd> coords;
};

std::shared_ptr<const OrbitTable> build_orbits(const ZetaContext& ctx, double log_norm_max) {
    const int n = ctx.degree();
    const auto& M = ctx.multipliers;
    Eigen::VectorXd weights(n);
    for (int k = 0; k < n; ++k) {
        double log_x = log_norm_max / n;
        for (int j = 0; j < M.rank(); ++j) log_x += std::max(0.0, std::log(M.generators[j][k]));
        weights[k] = std::exp(-2.0 * log_x);
    }
    auto table = std::make_shared<OrbitTable>();
    table->log_norm_max = log_norm_max;
    const Eigen::MatrixXd gram = weighted_gram(ctx.lattice, weights);
    Eigen::VectorXd logs(n);
    enumerate_ellipsoid(gram, n, [&](const Eigen::VectorXi& c) {
        const Eigen::VectorXd v = ctx.lattice.basis * c.cast<double>();
        double ln = 0.0;
        for (int k = 0; k < n; ++k) {
            logs[k] = std::log(std::abs(v[k]));
            ln += logs[k];
        }
        if (ln > log_norm_max) return;
        Eigen::VectorXd y(n - 1);
        for (int j = 1; j < n; ++j) {
            y[j - 1] = M.E_inverse.row(j).dot(logs);
            if (snapped_floor(y[j - 1]) != 0) return;
        }
        table->log_norm.push_back(ln);
        table->coords.push_back(y);
    });
    return table;
}

std::shared_ptr<const OrbitTable> cached_orbits(const ZetaContext& ctx, double log_norm_max) {
    static std::mutex mutex;
    static std::map<std::vector<double>, std::shared_ptr<const OrbitTable>> cache;
    std::vector<double> key(ctx.lattice.basis.data(), ctx.lattice.basis.data() + ctx.lattice.basis.size());
    key.insert(key.end(), ctx.multipliers.E.data(), ctx.multipliers.E.data() + ctx.multipliers.E.size());
    {
        std::lock_guard<std::mutex> lock(mutex);
        auto it = cache.find(key);
        if (it != cache.end() && it->second->log_norm_max >= log_norm_max) return it->second;
    }
    auto table = build_orbits(ctx, log_norm_max);
    std::lock_guard<std::mutex> lock(mutex);
    if (cache.size() > 32) cache.clear();
    cache[key] = table;
    return table;
}

Complex direct_sum(const OrbitTable& table, const ZetaContext& ctx, Complex s, double log_base, double eta) {
    std::vector<Complex> terms;
    terms.reserve(table.log_norm.size());
    for (std::size_t i = 0; i < table.log_norm.size(); ++i) {
        const double x = (table.log_norm[i] - log_base) / eta;
        if (x > 6.0) continue;
        double phase = 0.0;
        for (Eigen::Index j = 0; j < ctx.m.size(); ++j) phase -= ctx.m[j] * table.coords[i][j];
        const Complex e = std::exp(-s * table.log_norm[i] + Complex(0.0, 2.0 * pi * phase));
        terms.push_back(0.5 * std::erfc(x) * e);
    }
    Complex sum = pairwise_sum(terms);
    if (ctx.trivial_character()) {
        // Sum of rho x^{-s} (1 - W(x / B)) over the continuum: rho B^{1-s} exp(eta^2 (1-s)^2 / 4) / (s - 1).
        const Complex w = 1.0 - s;
        sum += residue_at_one(ctx) * std::exp(w * log_base + 0.25 * eta * eta * w * w) / (s - 1.0);
    }
    return sum;
}

// Integral over u >= 0 of e^{n s y0 / 2} * mean over the trapezoid grid of (Theta_L(x) - 1) e^{2 pi i m.y}
// with y0 = tau + u and log x = y0 + sum_j 2 y_j log eps_j.
struct HalfIntegral {
    Complex value;
    double error = 0.0;
};

HalfIntegral half_integral(const EmbeddedLattice& lattice, const MultiplierGroup& M, Complex s,
                           const Eigen::VectorXi& m, Complex tau, int nodes, double rel_tol) {
    const int n = lattice.degree();
    const int r = n - 1;
    int total = 1;
    for (int j = 0; j < r; ++j) total *= nodes;
    const double cos_delta = std::cos(tau.imag());
    // With x = e^{y0} w(y), sum_k x_k l_k^2 = e^{y0} q_y(l): per grid point keep the sorted values
    // q_y(l) over one of each pair +-l, covering the largest ellipsoid needed (at u = 0).
    const double reach = kThetaCut / (cos_delta * std::exp(tau.real()));
    std::vector<std::vector<double>> forms(total);
    std::vector<Complex> chi(total);
    double mu0 = std::numeric_limits<double>::infinity();
    for (int idx = 0; idx < total; ++idx) {
        int rem = idx;
        double phase = 0.0;
        Eigen::VectorXd log_w = Eigen::VectorXd::Zero(n);
        for (int j = 0; j < r; ++j) {
            const double y = static_cast<double>(rem % nodes) / nodes;
            rem /= nodes;
            phase += m[j] * y;
            for (int k = 0; k < n; ++k) log_w[k] += 2.0 * y * std::log(M.generators[j][k]);
        }
        chi[idx] = std::polar(1.0, 2.0 * pi * phase);
        const Eigen::VectorXd w = log_w.array().exp().matrix();
        const Eigen::MatrixXd gram = weighted_gram(lattice, w);
        auto& q = forms[idx];
        enumerate_ellipsoid(gram, reach, [&](const Eigen::VectorXi& c) {
            for (int i = n - 1; i >= 0; --i) {
                if (c[i] > 0) break;
                if (c[i] < 0) return;
            }
            const Eigen::VectorXd cd = c.cast<double>();
            q.push_back(cd.dot(gram * cd));
        });
        std::sort(q.begin(), q.end());
        mu0 = std::min(mu0, q.empty() ? shortest_weighted(lattice, w) : q.front());
    }

    const double sigma_plus = std::max(0.0, s.real());
    double u_max = 0.0;
    while (pi * cos_delta * std::exp(tau.real() + u_max) * mu0 - 0.5 * n * sigma_plus * u_max < 50.0) {
        u_max += 0.25;
        if (u_max > 80.0) fail(ErrorKind::Numeric, "theta integral cutoff not reached");
    }

    auto inner = [&](double u, double* abs_mean) {
        const Complex y0 = tau + u;
        const Complex a = -pi * std::exp(y0);
        const double limit = kThetaCut / (cos_delta * std::exp(tau.real() + u));
        Complex acc = 0.0;
        double acc_abs = 0.0;
        for (int idx = 0; idx < total; ++idx) {
            Complex t = 0.0;
            for (double q : forms[idx]) {
                if (q > limit) break;
                t += std::exp(a * q);
            }
            acc += t * chi[idx];
            acc_abs += std::abs(t);
        }
        const Complex factor = 2.0 * std::exp(0.5 * n * s * y0);
        if (abs_mean) *abs_mean = acc_abs / total * std::abs(factor);
        return acc / static_cast<double>(total) * factor;
    };
    double scale = 0.0;
    for (double u : {0.0, 0.25 * u_max, 0.5 * u_max}) {
        double v = 0.0;
        inner(u, &v);
        scale = std::max(scale, v);
    }
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = std::max(1e-300, 1e-15 * scale);
    opt.max_intervals = 2000;
    auto res = quad::integrate<Complex>([&](double u) { return inner(u, nullptr); }, 0.0, u_max, opt);
    return {res.value, res.error};
}

int default_nodes(const MultiplierGroup& M, const Eigen::VectorXi& m, double delta) {
    double spread = 0.0;
    for (int k = 0; k < M.degree(); ++k) {
        double s = 0.0;
        for (int j = 0; j < M.rank(); ++j) s += std::abs(std::log(M.generators[j][k]));
        spread = std::max(spread, s);
    }
    const int mmax = m.size() ? m.cwiseAbs().maxCoeff() : 0;
    return 16 + mmax + static_cast<int>(std::ceil(20.0 * spread / (0.5 * pi - std::abs(delta))));
}

double default_rotation(double t) {
    const double a = std::abs(t);
    if (a < 10.0 / (0.5 * pi)) return 0.0;
    return std::copysign(std::min(0.5 * pi - 10.0 / a, 1.47), t);
}

}  // namespace

ZetaContext ZetaContext::make(EmbeddedLattice lattice, MultiplierGroup multipliers, Eigen::VectorXi m) {
    ZetaContext ctx{std::move(lattice), std::move(multipliers), std::move(m)};
    check_context_shape(ctx);
    if (!zeta_eligible(ctx.lattice)) fail(ErrorKind::Domain, "lattice has a nonzero vector of norm zero");
    for (const auto& eps : ctx.multipliers.generators)
        for (int i = 0; i < ctx.degree(); ++i)
            if (!ctx.lattice.contains(eps.cwiseProduct(ctx.lattice.basis.col(i))))
                fail(ErrorKind::Domain, "multiplier group does not preserve the lattice");
    return ctx;
}

ZetaContext ZetaContext::dual() const {
    return ZetaContext{dual_lattice(lattice), multipliers, -m};
}

ZetaContext ZetaContext::with_character(const Eigen::VectorXi& index) const {
    ZetaContext out{lattice, multipliers, index};
    check_context_shape(out);
    return out;
}

ZetaContext hilbert_zeta_context(const FieldEmbedding& k, const Eigen::VectorXi& m) {
    return ZetaContext::make(ring_of_integers_lattice(k), hilbert_multipliers(k), m);
}

ZetaContext hilbert_zeta_context(const FieldEmbedding& k, int m) {
    return hilbert_zeta_context(k, Eigen::VectorXi::Constant(1, m));
}

ZetaContext order_zeta_context(const FieldEmbedding& k, int conductor, int m) {
    if (conductor < 1) fail(ErrorKind::Domain, "conductor must be positive");
    EmbeddedLattice lattice = ring_of_integers_lattice(k);
    lattice.basis.col(1) *= conductor;
    const Eigen::VectorXd eps = fundamental_totally_positive_unit(k);
    Eigen::VectorXd power = eps;
    for (int e = 1; e <= 64; ++e, power = power.cwiseProduct(eps)) {
        bool preserves = true;
        for (int i = 0; i < 2; ++i) preserves = preserves && lattice.contains(power.cwiseProduct(lattice.basis.col(i)));
        if (preserves)
            return ZetaContext::make(std::move(lattice), make_multiplier_group({power}), Eigen::VectorXi::Constant(1, m));
    }
    fail(ErrorKind::Resource, "no small unit power preserves the order");
}

void for_each_short_vector(const EmbeddedLattice& lattice, const Eigen::VectorXd& weights, double bound,
                           const std::function<void(const Eigen::VectorXi&, const Eigen::VectorXd&)>& f) {
    if (weights.size() != lattice.degree() || (weights.array() <= 0).any())
        fail(ErrorKind::Domain, "weights must be positive");
    enumerate_ellipsoid(weighted_gram(lattice, weights), bound,
                        [&](const Eigen::VectorXi& c) { f(c, lattice.basis * c.cast<double>()); });
}

Complex theta_minus_one(const EmbeddedLattice& lattice, const Eigen::VectorXcd& x) {
    const Eigen::VectorXd re = x.real();
    if (x.size() != lattice.degree() || (re.array() <= 0).any())
        fail(ErrorKind::Domain, "theta needs Re x_k > 0");
    const Eigen::MatrixXd gram = weighted_gram(lattice, re);
    const Eigen::MatrixXcd cgram = lattice.basis.transpose().cast<Complex>() * x.asDiagonal() *
                                   lattice.basis.cast<Complex>();
    Complex sum = 0.0;
    enumerate_ellipsoid(gram, kThetaCut, [&](const Eigen::VectorXi& c) {
        const Eigen::VectorXcd cd = c.cast<Complex>();
        sum += std::exp(-pi * cd.dot(cgram * cd));
    });
    return sum;
}

double theta(const EmbeddedLattice& lattice, const Eigen::VectorXd& x) {
    if (x.size() != lattice.degree() || (x.array() <= 0).any())
        fail(ErrorKind::Domain, "theta needs x_k > 0");
    return 1.0 + theta_minus_one(lattice, x.cast<Complex>()).real();
}

ZetaValue zeta_direct(const ZetaContext& ctx, Complex s, const DirectOptions& opt) {
    check_context_shape(ctx);
    if (!(s.real() > 1.0)) fail(ErrorKind::Domain, "direct summation needs Re s > 1");
    if (!(opt.base_norm > 1.0) || !(opt.eta > 0.0)) fail(ErrorKind::Domain, "invalid cutoff parameters");
    const double log_base = std::log(opt.base_norm);
    const auto table = cached_orbits(ctx, log_base + 6.0 * opt.eta + 1e-9);
    const Complex z = direct_sum(*table, ctx, s, log_base, opt.eta);
    const Complex coarse = direct_sum(*table, ctx, s, log_base - std::log(2.0), opt.eta);
    return {z, std::abs(z - coarse), "direct"};
}

ZetaValue completed_xi(const ZetaContext& ctx, Complex s, const ContinuationOptions& opt) {
    check_context_shape(ctx);
    if (!(opt.split > 0.0)) fail(ErrorKind::Domain, "split point must be positive");
    const bool trivial = ctx.trivial_character();
    if (trivial && (std::abs(s) < 1e-14 || std::abs(s - 1.0) < 1e-14))
        fail(ErrorKind::Pole, "Xi has poles at s = 0 and s = 1 for the trivial character");
    const int n = ctx.degree();
    const double delta = opt.rotation ? *opt.rotation : default_rotation(s.imag());
    if (!(std::abs(delta) < 0.5 * pi)) fail(ErrorKind::Domain, "contour angle must lie in (-pi/2, pi/2)");
    const int nodes = opt.periodic_nodes > 0 ? opt.periodic_nodes : default_nodes(ctx.multipliers, ctx.m, delta);
    const Complex tau(std::log(opt.split) / n, delta);
    const double vol = covolume(ctx.lattice);
    const double detE = std::abs(ctx.multipliers.det_E);
    const EmbeddedLattice dual = dual_lattice(ctx.lattice);

    const auto primal = half_integral(ctx.lattice, ctx.multipliers, s, ctx.m, tau, nodes, opt.rel_tol);
    const auto mirror = half_integral(dual, ctx.multipliers, 1.0 - s, -ctx.m, -tau, nodes, opt.rel_tol);
    const double jac = std::ldexp(detE, n - 1);
    Complex xi = jac * (primal.value + mirror.value / vol);
    double err = jac * (primal.error + mirror.error / vol);
    if (trivial) {
        const double c = std::ldexp(detE, n) / n;
        xi += -c * std::exp(0.5 * n * tau * s) / s + c / vol * std::exp(0.5 * n * tau * (s - 1.0)) / (s - 1.0);
    }
    return {xi, err, "theta-split"};
}

ZetaValue zeta_continued(const ZetaContext& ctx, Complex s, const ContinuationOptions& opt) {
    const int n = ctx.degree();
    const Eigen::VectorXcd sk = exponents_from(ctx.multipliers, s, ctx.m);
    Complex log_gamma_sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const Complex h = 0.5 * sk[k];
        const double nearest = std::round(h.real());
        if (nearest <= 0 && std::abs(h - nearest) < 1e-14) {
            // 1 / Gamma vanishes: trivial zero, unless Xi itself has a pole there.
            if (ctx.trivial_character() && std::abs(s) < 1e-14)
                fail(ErrorKind::Pole, "Z(s, 0) has a pole at s = 0");
            return {0.0, 0.0, "trivial-zero"};
        }
        log_gamma_sum += log_gamma(h);
    }
    const ZetaValue xi = completed_xi(ctx, s, opt);
    const Complex factor = std::exp(0.5 * n * s * std::log(pi) - log_gamma_sum);
    return {xi.value * factor, xi.error_estimate * std::abs(factor), xi.method};
}

double functional_equation_residual(const ZetaContext& ctx, Complex s) {
    const double vol = covolume(ctx.lattice);
    ContinuationOptions left, right;
    left.split = 1.0;
    right.split = std::numbers::e;
    const Complex lhs = std::sqrt(vol) * completed_xi(ctx, s, left).value;
    const Complex rhs = completed_xi(ctx.dual(), 1.0 - s, right).value / std::sqrt(vol);
    const double denom = std::abs(lhs) + std::abs(rhs);
    return denom == 0.0 ? 0.0 : std::abs(lhs - rhs) / denom;
}

double residue_at_one(const ZetaContext& ctx) {
    check_context_shape(ctx);
    if (!ctx.trivial_character()) fail(ErrorKind::Domain, "Z(s, m) is entire for m != 0");
    const int n = ctx.degree();
    return std::ldexp(std::abs(ctx.multipliers.det_E), n) / (n * covolume(ctx.lattice));
}

ConvexityReport convexity_spot_check(const ZetaContext& ctx, const std::vector<double>& t_grid) {
    if (t_grid.size() < 3) fail(ErrorKind::Domain, "need at least three heights");
    for (double t : t_grid)
        if (!(t > 0)) fail(ErrorKind::Domain, "heights must be positive");
    ConvexityReport report;
    report.t_grid = t_grid;
    const int n = ctx.degree();
    const std::size_t count = t_grid.size();
    for (double sigma : {0.25, 0.5, 0.75}) {
        std::vector<double> logs(count);
        for (std::size_t i = 0; i < count; ++i)
            logs[i] = std::log(std::abs(zeta_continued(ctx, Complex(sigma, t_grid[i])).value));
        // Upper envelope: local maximum over neighbours, so isolated zeros do not drag the fit down.
        std::vector<double> env(count);
        for (std::size_t i = 0; i < count; ++i) {
            env[i] = logs[i];
            if (i > 0) env[i] = std::max(env[i], logs[i - 1]);
            if (i + 1 < count) env[i] = std::max(env[i], logs[i + 1]);
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < count; ++i) {
            const double x = std::log(t_grid[i]);
            sx += x;
            sy += env[i];
            sxx += x * x;
            sxy += x * env[i];
        }
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        ConvexityLine line;
        line.sigma = sigma;
        line.exponent = slope;
        line.bound = 0.5 * n * (1.0 - sigma) + 0.3;
        line.within_bound = slope <= line.bound;
        report.lines.push_back(line);
    }
    report.monotone = report.lines[0].exponent >= report.lines[1].exponent &&
                      report.lines[1].exponent >= report.lines[2].exponent;
    for (double t : t_grid)
        report.max_on_line_two = std::max(report.max_on_line_two, std::abs(zeta_continued(ctx, Complex(2.0, t)).value));
    report.z_two = zeta_continued(ctx, Complex(2.0, 0.0)).value.real();
    return report;
}

}  // namespace hmf
