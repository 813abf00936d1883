#include "hmftrace/trace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmftrace/error.hpp"
#include "hmftrace/modgroup.hpp"
#include "hmftrace/specfun.hpp"
#include "hmftrace/zeta.hpp"

namespace hmf {

using std::numbers::pi;

namespace {

const Complex kI(0.0, 1.0);

quad::Options options_of(const TraceOptions& opt) {
    quad::Options o;
    o.rel_tol = opt.rel_tol;
    o.abs_tol = opt.abs_tol;
    return o;
}

// int psi_k(S(r, theta)) g_mu(r) sinh r dr over the support.
quad::Result<Complex> elliptic_factor(const TestFunction& psi, int k, double theta, Complex mu, const TraceOptions& opt) {
    const double st = std::sin(theta);
    if (!(theta > 0.0 && theta < pi) || st < 1e-12)
        fail(ErrorKind::DegenerateAngle, "elliptic angle must lie in (0, pi)");
    const double r_lo = std::asinh(std::sqrt(psi.support_lower(k)) / (2.0 * st));
    const double r_hi = std::asinh(std::sqrt(psi.support_upper(k)) / (2.0 * st));
    if (r_hi <= r_lo) return {};
    const auto g = SphericalSolution::radial(mu, r_hi);
    auto f = [&](double r) -> Complex {
        const double S = std::pow(2.0 * std::sinh(r) * st, 2);
        const double p = psi.factor(k, S);
        return p == 0.0 ? Complex(0.0) : p * g.value(r) * std::sinh(r);
    };
    return quad::integrate<Complex>(f, r_lo, r_hi, options_of(opt));
}

// int psi_k(a / cos^2 theta) f_mu(theta) dtheta / cos^2 theta over (-pi/2, pi/2), with t = tan theta.
quad::Result<Complex> hyperbolic_factor(const TestFunction& psi, int k, double a, Complex mu, bool fold,
                                        const TraceOptions& opt) {
    const double hi = psi.support_upper(k), lo = psi.support_lower(k);
    if (a >= hi) return {};
    const double T = std::sqrt(hi / a - 1.0);
    const double t_lo = lo > a ? std::sqrt(lo / a - 1.0) : 0.0;
    const auto f = SphericalSolution::angular(mu, std::atan(T));
    auto integrand = [&](double t) -> Complex {
        const double p = psi.factor(k, a * (1.0 + t * t));
        return p == 0.0 ? Complex(0.0) : p * f.value(std::atan(t));
    };
    if (fold) {
        auto r = quad::integrate<Complex>(integrand, t_lo, T, options_of(opt));
        r.value *= 2.0;
        r.error *= 2.0;
        return r;
    }
    if (t_lo == 0.0) return quad::integrate<Complex>(integrand, -T, T, options_of(opt));
    auto left = quad::integrate<Complex>(integrand, -T, -t_lo, options_of(opt));
    const auto right = quad::integrate<Complex>(integrand, t_lo, T, options_of(opt));
    left.value += right.value;
    left.error += right.error;
    return left;
}

// Point with geodesic polar coordinates (r, phi) about i.
Complex polar_point(double r, double phi) {
    const Complex zeta = std::tanh(0.5 * r) * std::exp(Complex(0.0, phi));
    return kI * (1.0 + zeta) / (1.0 - zeta);
}

// Fixed point in H of an elliptic coordinate.
Complex elliptic_fixed_point(double a, double b, double c, double d) {
    if (c == 0.0) fail(ErrorKind::Domain, "elliptic coordinate with c = 0");
    const Complex root = std::sqrt(Complex((a - d) * (a - d) + 4.0 * b * c, 0.0));
    Complex z = ((a - d) + root) / (2.0 * c);
    if (z.imag() < 0) z = ((a - d) - root) / (2.0 * c);
    return z;
}

// Geodesic radius about a fixed point beyond which the point-pair argument exceeds `bound`.
double support_radius(const std::function<double(double)>& arg_at, double bound) {
    double hi = 1.0;
    while (arg_at(hi) <= bound) {
        hi *= 2.0;
        if (hi > 60.0) fail(ErrorKind::Unsupported, "kernel support is unbounded");
    }
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (arg_at(mid) <= bound ? lo : hi) = mid;
    }
    return hi * (1.0 + 1e-9);
}

Eigen::VectorXd diagonal_direction(int n) { return Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n))); }

TermResult constant_term(Complex value, double error) {
    TermResult t;
    t.value = value;
    t.constant = value;
    t.error_estimate = error;
    return t;
}

}  // namespace

bool AutomorphicFormData::is_cusp_form() const {
    for (const auto& c : cusps)
        if (c.eta != 0.0 || c.phi != 0.0) return false;
    return true;
}

Eigen::VectorXcd AutomorphicFormData::eigen_exponents() const { return exponents_from(multipliers, s, m_u); }

Eigen::VectorXcd AutomorphicFormData::eigenvalues() const {
    const Eigen::VectorXcd sk = eigen_exponents();
    return sk.array() * (sk.array() - 1.0);
}

void AutomorphicFormData::validate(bool relax_strip) const {
    if (m_u.size() != multipliers.rank()) fail(ErrorKind::Domain, "m_u must have n - 1 entries");
    if (is_cusp_form() && !m_u.isZero()) fail(ErrorKind::Domain, "m_u must be 0 when u vanishes at every cusp");
    for (const auto& c : cusps)
        if (c.frame.lattice.degree() != degree()) fail(ErrorKind::Domain, "cusp frame has the wrong degree");
    if (!relax_strip && !(s.real() > 0.0 && s.real() < 1.0))
        fail(ErrorKind::Domain, "trace terms require 0 < Re s < 1");
}

AutomorphicFormData demo_eisenstein_form(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m_u) {
    AutomorphicFormData f;
    f.s = s;
    f.m_u = m_u;
    f.multipliers = hilbert_multipliers(k);
    f.cusps.push_back({"infinity", infinity_frame(k), 1.0, 0.0});
    const Eigen::VectorXcd sk = f.eigen_exponents();
    f.u = [sk](const PointN& z) {
        Complex acc = 0.0;
        for (Eigen::Index j = 0; j < z.size(); ++j) acc += sk[j] * std::log(z[j].imag());
        return std::exp(acc);
    };
    return f;
}

AutomorphicFormData cusp_form_zero(const FieldEmbedding& k) {
    AutomorphicFormData f;
    f.s = 0.5;
    f.multipliers = hilbert_multipliers(k);
    f.m_u = Eigen::VectorXi::Zero(f.multipliers.rank());
    f.cusps.push_back({"infinity", infinity_frame(k), 0.0, 0.0});
    f.u = [](const PointN&) { return Complex(0.0); };
    return f;
}

double Parallelotope::jacobian() const {
    const int n = dimension();
    if (diagonal_line) {
        if (generators.rows() != n || generators.cols() != n - 1)
            fail(ErrorKind::Domain, "cusp cell needs n x (n-1) generators");
        Eigen::MatrixXd full(n, n);
        full << generators, diagonal_direction(n);
        return std::abs(full.determinant());
    }
    if (generators.rows() != n || generators.cols() != n) fail(ErrorKind::Domain, "cell needs n x n generators");
    return std::abs(generators.determinant());
}

TermResult elliptic_term(const TestFunction& psi, const Eigen::VectorXd& angles, int m_gamma, Complex u_at_fixed_point,
                         const Eigen::VectorXcd& mu, const TraceOptions& opt) {
    const int n = psi.degree();
    if (angles.size() != n || mu.size() != n) fail(ErrorKind::Domain, "angles and mu must have n entries");
    if (m_gamma < 1) fail(ErrorKind::Domain, "centralizer order must be positive");
    for (int k = 0; k < n; ++k)
        if (!(angles[k] > 0.0 && angles[k] < pi)) fail(ErrorKind::DegenerateAngle, "elliptic angle must lie in (0, pi)");
    if (psi.is_zero()) return constant_term(0.0, 0.0);
    Complex prod = psi.amplitude;
    double rel_err = 0.0;
    TermResult out;
    for (int k = 0; k < n; ++k) {
        const auto f = elliptic_factor(psi, k, angles[k], mu[k], opt);
        prod *= f.value;
        rel_err += f.error / std::max(std::abs(f.value), 1e-300);
        out.components.emplace_back("radial factor " + std::to_string(k + 1), f.value);
    }
    const Complex value = std::pow(2.0 * pi, n) / static_cast<double>(m_gamma) * u_at_fixed_point * prod;
    out.value = out.constant = value;
    out.error_estimate = rel_err * std::abs(value);
    return out;
}

quad::Result<Complex> elliptic_oracle(const TestFunction& psi, const GroupElementN& gamma, const Evaluator& u,
                                      const TraceOptions& opt) {
    const int n = gamma.degree();
    if (psi.degree() != n) fail(ErrorKind::Domain, "test function degree mismatch");
    const auto cls = classify(gamma);
    if (cls.kind != ElementKind::TotallyElliptic) fail(ErrorKind::Domain, "elliptic_oracle needs a totally elliptic element");
    for (double t : cls.angles)
        if (std::sin(t) < 1e-12) fail(ErrorKind::DegenerateAngle, "degenerate elliptic angle");
    if (psi.is_zero()) return {};
    // Coordinate k: z_k = x_k + y_k w with w in polar coordinates about i.
    Eigen::VectorXcd center(n);
    std::vector<double> R(n);
    for (int k = 0; k < n; ++k) {
        center[k] = elliptic_fixed_point(gamma.a[k], gamma.b[k], gamma.c[k], gamma.d[k]);
        auto arg_at = [&](double r) {
            const Complex z = center[k].real() + center[k].imag() * polar_point(r, 0.3);
            const Complex w = (gamma.a[k] * z + gamma.b[k]) / (gamma.c[k] * z + gamma.d[k]);
            return std::norm(z - w) / (z.imag() * w.imag());
        };
        R[k] = support_radius(arg_at, psi.support_upper(k));
    }
    const int P = opt.angle_nodes;
    auto integrand = [&](const std::vector<double>& r) -> Complex {
        Complex sum = 0.0;
        std::vector<int> idx(n, 0);
        PointN z(n);
        const int total = static_cast<int>(std::pow(P, n));
        for (int flat = 0; flat < total; ++flat) {
            int rem = flat;
            for (int k = 0; k < n; ++k) {
                const double phi = 2.0 * pi * (rem % P) / P;
                rem /= P;
                z[k] = center[k].real() + center[k].imag() * polar_point(r[k], phi);
            }
            const double kv = psi(point_pair_u(z, act(gamma, z)));
            if (kv != 0.0) sum += kv * u(z);
        }
        double jac = 1.0;
        for (int k = 0; k < n; ++k) jac *= 2.0 * pi * std::sinh(r[k]);
        return sum / static_cast<double>(total) * jac;
    };
    quad::Options o = options_of(opt);
    return quad::integrate_box<Complex>(integrand, std::vector<double>(n, 0.0), R, o);
}

TermResult mixed_term(const TestFunction& psi, const Eigen::VectorXd& norms, const Eigen::VectorXd& angles, Complex F0,
                      const Eigen::VectorXcd& mu, const TraceOptions& opt) {
    const int n = psi.degree();
    const int m = static_cast<int>(norms.size());
    if (m < 1 || m + angles.size() != n || mu.size() != n)
        fail(ErrorKind::Domain, "mixed term needs m >= 1 norms and n - m angles");
    for (int k = 0; k < m; ++k)
        if (!(norms[k] > 1.0)) fail(ErrorKind::Domain, "hyperbolic norms must exceed 1");
    for (Eigen::Index l = 0; l < angles.size(); ++l)
        if (!(angles[l] > 0.0 && angles[l] < pi)) fail(ErrorKind::DegenerateAngle, "elliptic angle must lie in (0, pi)");
    TermResult out;
    if (psi.is_zero()) return constant_term(0.0, 0.0);
    for (int k = 0; k < m; ++k) {
        const double a = norms[k] + 1.0 / norms[k] - 2.0;
        if (a >= psi.support_upper(k)) {
            out.components.emplace_back("outside support in coordinate " + std::to_string(k + 1), 0.0);
            return out;
        }
    }
    Complex prod = psi.amplitude;
    double rel_err = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto f = k < m ? hyperbolic_factor(psi, k, norms[k] + 1.0 / norms[k] - 2.0, mu[k], true, opt)
                             : elliptic_factor(psi, k, angles[k - m], mu[k], opt);
        prod *= f.value;
        rel_err += f.error / std::max(std::abs(f.value), 1e-300);
        out.components.emplace_back((k < m ? "angular factor " : "radial factor ") + std::to_string(k + 1), f.value);
    }
    out.components.emplace_back("F0", F0);
    const Complex value = std::pow(2.0 * pi, n - m) * F0 * prod;
    out.value = out.constant = value;
    out.error_estimate = rel_err * std::abs(value);
    return out;
}

quad::Result<Complex> mixed_oracle(const TestFunction& psi, const GroupElementN& nu, double period, const Evaluator& u,
                                   const TraceOptions& opt) {
    if (nu.degree() != 2 || psi.degree() != 2) fail(ErrorKind::UnsupportedDegree, "mixed_oracle is implemented for n = 2");
    if (!(period > 1.0)) fail(ErrorKind::Domain, "period must exceed 1");
    if (std::abs(nu.b[0]) > 1e-12 || std::abs(nu.c[0]) > 1e-12)
        fail(ErrorKind::Domain, "first coordinate must be diagonal");
    if (std::abs(nu.a[1] + nu.d[1]) >= 2.0) fail(ErrorKind::Domain, "second coordinate must be elliptic");
    if (psi.is_zero()) return {};
    const Complex center = elliptic_fixed_point(nu.a[1], nu.b[1], nu.c[1], nu.d[1]);
    auto image2 = [&](Complex z) { return (nu.a[1] * z + nu.b[1]) / (nu.c[1] * z + nu.d[1]); };
    const double R = support_radius(
        [&](double r) {
            const Complex z = center.real() + center.imag() * polar_point(r, 0.3);
            const Complex w = image2(z);
            return std::norm(z - w) / (z.imag() * w.imag());
        },
        psi.support_upper(1));
    // The argument in coordinate 1 grows as arg z_1 leaves pi/2; find where it leaves the support.
    auto arg1 = [&](double phi) {
        const Complex z = std::exp(Complex(0.0, phi));
        const Complex w = (nu.a[0] * z + nu.b[0]) / (nu.c[0] * z + nu.d[0]);
        return std::norm(z - w) / (z.imag() * w.imag());
    };
    double phi_lo = 0.0;
    if (arg1(0.5 * pi) > psi.support_upper(0)) return {};
    {
        double lo = 1e-9, hi = 0.5 * pi;
        for (int it = 0; it < 80; ++it) {
            const double mid = 0.5 * (lo + hi);
            (arg1(mid) > psi.support_upper(0) ? lo : hi) = mid;
        }
        phi_lo = lo * (1.0 - 1e-9);
    }
    const int P = opt.angle_nodes;
    auto integrand = [&](const std::vector<double>& x) -> Complex {
        // x = (log |z_1|, arg z_1, r_2).
        const Complex z1 = std::exp(Complex(x[0], x[1]));
        Complex sum = 0.0;
        PointN z(2);
        z[0] = z1;
        for (int j = 0; j < P; ++j) {
            z[1] = center.real() + center.imag() * polar_point(x[2], 2.0 * pi * j / P);
            const double kv = psi(point_pair_u(z, act(nu, z)));
            if (kv != 0.0) sum += kv * u(z);
        }
        // dmu = d log r dphi / sin^2 phi in coordinate 1, sinh r dr dphi in coordinate 2.
        const double s = std::sin(x[1]);
        return sum / static_cast<double>(P) * 2.0 * pi * std::sinh(x[2]) / (s * s);
    };
    return quad::integrate_box<Complex>(integrand, {0.0, phi_lo, 0.0}, {std::log(period), pi - phi_lo, R},
                                        options_of(opt));
}

Complex F0_of_centralizer(const Evaluator& u, const GroupElementN& rho, const Parallelotope& cell, int hyperbolic,
                          const TraceOptions& opt) {
    const int n = rho.degree();
    const int m = hyperbolic;
    if (m < 1 || m > n || cell.dimension() != m || cell.diagonal_line)
        fail(ErrorKind::Domain, "centralizer cell must be an m-dimensional parallelotope");
    const double jac = cell.jacobian();
    if (!(jac > 1e-14 * std::max(1.0, cell.generators.cwiseAbs().maxCoeff())))
        fail(ErrorKind::Domain, "degenerate centralizer cell");
    auto integrand = [&](const std::vector<double>& t) -> Complex {
        Eigen::VectorXd tv = Eigen::Map<const Eigen::VectorXd>(t.data(), m);
        const Eigen::VectorXd logr = cell.anchor + cell.generators * tv;
        PointN z = PointN::Constant(n, kI);
        for (int k = 0; k < m; ++k) z[k] = std::exp(logr[k]) * kI;
        return u(act(rho, z));
    };
    return jac * quad::integrate_box<Complex>(integrand, std::vector<double>(m, 0.0), std::vector<double>(m, 1.0),
                                              options_of(opt))
                     .value;
}

GroupElementN centralizer_conjugator(const GroupElementN& gamma) {
    const int n = gamma.degree();
    Eigen::VectorXd A(n), B(n), C(n), D(n);
    bool seen_elliptic = false;
    for (int k = 0; k < n; ++k) {
        const double a = gamma.a[k], b = gamma.b[k], c = gamma.c[k], d = gamma.d[k];
        const double t = std::abs(a + d);
        if (std::abs(t - 2.0) <= 1e-9) fail(ErrorKind::Domain, "parabolic coordinate has no such conjugator");
        if (t < 2.0) {
            seen_elliptic = true;
            const Complex z = elliptic_fixed_point(a, b, c, d);
            const double sy = std::sqrt(z.imag());
            A[k] = sy;
            B[k] = z.real() / sy;
            C[k] = 0.0;
            D[k] = 1.0 / sy;
            continue;
        }
        if (seen_elliptic) fail(ErrorKind::Domain, "hyperbolic coordinates must come first");
        if (c == 0.0) {
            const double x = b / (d - a);
            if (std::abs(a) > std::abs(d)) {
                // Attracting infinity, repelling x: translation by x.
                A[k] = 1.0, B[k] = x, C[k] = 0.0, D[k] = 1.0;
            } else {
                A[k] = x, B[k] = -1.0, C[k] = 1.0, D[k] = 0.0;
            }
            continue;
        }
        const double disc = std::sqrt((a + d) * (a + d) - 4.0);
        const double x1 = ((a - d) + disc) / (2.0 * c), x2 = ((a - d) - disc) / (2.0 * c);
        const bool first_attracts = std::abs(c * x1 + d) > 1.0;
        const double xa = first_attracts ? x1 : x2, xr = first_attracts ? x2 : x1;
        if (xa > xr) {
            const double s = 1.0 / std::sqrt(xa - xr);
            A[k] = xa * s, B[k] = xr * s, C[k] = s, D[k] = s;
        } else {
            const double s = 1.0 / std::sqrt(xr - xa);
            A[k] = xa * s, B[k] = -xr * s, C[k] = s, D[k] = -s;
        }
    }
    return GroupElementN::from_real(A, B, C, D);
}

Eigen::VectorXd hyp_par_E(const MultiplierGroup& M, const Eigen::VectorXi& m) {
    const int n = M.degree();
    Eigen::VectorXd log_u = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < M.rank(); ++j) log_u += m[j] * M.E.col(j + 1);
    Eigen::VectorXd E(n);
    for (int k = 0; k < n; ++k) E[k] = std::exp(-0.5 * log_u[k]) - std::exp(0.5 * log_u[k]);
    return E;
}

std::vector<Eigen::VectorXi> contributing_multipliers(const MultiplierGroup& M, const TransformTriple& triple) {
    const int n = M.degree(), r = M.rank();
    const Eigen::MatrixXd L = M.E.rightCols(r);
    const double smin = Eigen::JacobiSVD<Eigen::MatrixXd>(L).singularValues().minCoeff();
    double reach = 0.0;
    for (int k = 0; k < n; ++k) reach = std::max(reach, triple.g_support(k));
    // |L m|_inf >= smin |m|_2 / sqrt(n) >= smin |m|_inf / sqrt(n).
    const int R = static_cast<int>(std::ceil(reach * std::sqrt(static_cast<double>(n)) / smin));
    std::vector<Eigen::VectorXi> out;
    Eigen::VectorXi m = Eigen::VectorXi::Constant(r, -R);
    while (true) {
        if (!m.isZero()) {
            const Eigen::VectorXd lu = L * m.cast<double>();
            bool inside = true;
            for (int k = 0; k < n; ++k) inside = inside && std::abs(lu[k]) < triple.g_support(k);
            if (inside && triple.g(lu) != 0.0) out.push_back(m);
        }
        int j = 0;
        while (j < r && m[j] == R) m[j++] = -R;
        if (j == r) break;
        ++m[j];
    }
    return out;
}

TermResult hyp_par_main_term(double A, const TransformTriple& triple, const AutomorphicFormData& form) {
    form.validate();
    if (!(A > 0)) fail(ErrorKind::Domain, "A must be positive");
    TermResult out;
    out.a_dependent = true;
    if (!form.m_u.isZero()) {
        out.components.emplace_back("delta_{m_u}", 0.0);
        return out;
    }
    if (form.is_cusp_form()) return out;
    const MultiplierGroup& M = form.multipliers;
    const int n = M.degree();
    double gsum = 0.0;
    for (const auto& m : contributing_multipliers(M, triple)) {
        const Eigen::VectorXd lu = M.E.rightCols(M.rank()) * m.cast<double>();
        const double g = triple.g(lu);
        std::ostringstream label;
        label << "g(log u_m), m = (" << m.transpose() << ")";
        out.components.emplace_back(label.str(), g);
        gsum += g;
    }
    const double scale = std::abs(M.det_E) / n * gsum;
    const Complex s = form.s;
    for (const auto& c : form.cusps) {
        out.a_s_coeff += scale * c.eta / s;
        out.a_1ms_coeff += scale * c.phi / (1.0 - s);
    }
    out.value = out.a_s_coeff * std::pow(Complex(A), s) + out.a_1ms_coeff * std::pow(Complex(A), 1.0 - s);
    out.error_estimate = 1e-12 * std::abs(out.value);
    return out;
}

Complex hyp_par_theta_factor(const TestFunction& psi, const Eigen::VectorXd& E_m, const Eigen::VectorXcd& mu, bool fold,
                             const TraceOptions& opt) {
    const int n = psi.degree();
    if (E_m.size() != n || mu.size() != n) fail(ErrorKind::Domain, "E_m and mu must have n entries");
    for (int k = 0; k < n; ++k)
        if (E_m[k] == 0.0) fail(ErrorKind::Domain, "E_m has a zero coordinate");
    if (psi.is_zero()) return 0.0;
    Complex prod = psi.amplitude;
    for (int k = 0; k < n; ++k) prod *= hyperbolic_factor(psi, k, E_m[k] * E_m[k], mu[k], fold, opt).value;
    return prod;
}

TermResult hyp_par_C_term(Complex theta_factor, const RegularizedForm& form, const Parallelotope& cell,
                          const TraceOptions& opt) {
    const int n = cell.dimension();
    const double jac = cell.jacobian();
    if (!(jac > 0)) fail(ErrorKind::Domain, "degenerate cell");
    const int cdim = static_cast<int>(cell.generators.cols());
    const Eigen::VectorXd diag = diagonal_direction(n);
    // Parameters (t_1..t_cdim [, tau]).
    auto at = [&](const std::vector<double>& x) -> Complex {
        Eigen::VectorXd logr = cell.anchor;
        for (int j = 0; j < cdim; ++j) logr += x[j] * cell.generators.col(j);
        if (cell.diagonal_line) logr += x[cdim] * diag;
        const Complex v = form(logr.array().exp().matrix());
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(ErrorKind::NonIntegrable, "regularized form is not finite on the cell");
        return v;
    };
    quad::Options o = options_of(opt);
    o.throw_on_failure = false;
    std::vector<double> lo(cdim, 0.0), hi(cdim, 1.0);
    Complex integral = 0.0;
    double err = 0.0;
    if (!cell.diagonal_line) {
        const auto r = quad::integrate_box<Complex>(at, lo, hi, o);
        integral = r.value;
        err = r.error;
    } else {
        lo.push_back(-4.0);
        hi.push_back(4.0);
        auto r = quad::integrate_box<Complex>(at, lo, hi, o);
        integral = r.value;
        err = r.error;
        double T = 4.0, last_slab = std::abs(integral);
        bool settled = false;
        while (T < 2048.0) {
            lo.back() = T;
            hi.back() = 2.0 * T;
            const auto right = quad::integrate_box<Complex>(at, lo, hi, o);
            lo.back() = -2.0 * T;
            hi.back() = -T;
            const auto left = quad::integrate_box<Complex>(at, lo, hi, o);
            const Complex slab = left.value + right.value;
            integral += slab;
            err += left.error + right.error;
            T *= 2.0;
            if (std::abs(slab) <= opt.rel_tol * std::abs(integral) + opt.abs_tol) {
                settled = true;
                break;
            }
            if (std::abs(slab) > 2.0 * last_slab && T > 64.0)
                fail(ErrorKind::NonIntegrable, "regularized form grows along the cusp direction");
            last_slab = std::abs(slab);
        }
        if (!settled) fail(ErrorKind::NonIntegrable, "integral along the cusp direction does not settle");
    }
    TermResult out;
    out.value = out.constant = 0.5 * jac * integral * theta_factor;
    out.error_estimate = 0.5 * jac * err * std::abs(theta_factor);
    out.components.emplace_back("cell integral", jac * integral);
    out.components.emplace_back("theta factor", theta_factor);
    return out;
}

namespace {

void require_strip(const Eigen::VectorXcd& s_k) {
    for (Eigen::Index k = 0; k < s_k.size(); ++k)
        if (!(s_k[k].real() > 0.0 && s_k[k].real() < 1.0)) fail(ErrorKind::Domain, "F(0) needs 0 < Re s_k < 1");
}

// int over t > 0 of psi_k(t^2) t^{-p} dt with t = tau^{1/(1 - Re p)}, which removes the endpoint singularity.
Complex power_moment(const TestFunction& psi, int k, Complex p, const TraceOptions& opt) {
    const double sigma = p.real();
    const double alpha = 1.0 / (1.0 - sigma);
    const double t_lo = std::sqrt(psi.support_lower(k)), t_hi = std::sqrt(psi.support_upper(k));
    auto f = [&](double tau) -> Complex {
        if (tau <= 0.0) return 0.0;
        const double t = std::pow(tau, alpha);
        const double v = psi.factor(k, t * t);
        if (v == 0.0) return 0.0;
        return alpha * v * std::exp((alpha - 1.0 - alpha * p) * std::log(tau));
    };
    return quad::integrate<Complex>(f, std::pow(t_lo, 1.0 - sigma), std::pow(t_hi, 1.0 - sigma), options_of(opt)).value;
}

}  // namespace

Complex F0_direct(const TestFunction& psi, const Eigen::VectorXcd& s_k, const TraceOptions& opt) {
    if (s_k.size() != psi.degree()) fail(ErrorKind::Domain, "s_k must have n entries");
    require_strip(s_k);
    if (psi.is_zero()) return 0.0;
    Complex prod = psi.amplitude;
    for (int k = 0; k < psi.degree(); ++k) prod *= power_moment(psi, k, s_k[k], opt);
    return prod;
}

Complex F0tilde_direct(const TestFunction& psi, const Eigen::VectorXcd& s_k, const TraceOptions& opt) {
    if (s_k.size() != psi.degree()) fail(ErrorKind::Domain, "s_k must have n entries");
    require_strip(s_k);
    if (psi.is_zero()) return 0.0;
    Complex prod = psi.amplitude;
    for (int k = 0; k < psi.degree(); ++k) prod *= power_moment(psi, k, 1.0 - s_k[k], opt);
    return prod;
}

namespace {

// i / (2^{2+q} pi^2) Gamma((1-q)/2)^2 int_0^inf h_k(r) [R(r) - R(-r)] r dr with R(r) = Gamma(q/2 + ir) / Gamma(1 - q/2 + ir).
quad::Result<Complex> gamma_moment(const HGrid& grid, int k, Complex q) {
    const Complex g = complex_gamma(0.5 * (1.0 - q));
    const Complex pref = kI / (std::pow(2.0, 2.0 + q) * pi * pi) * g * g;
    const auto& rule = grid.rules[k];
    Complex sum = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double r = rule.nodes[j];
        const Complex up = std::exp(log_gamma(0.5 * q + kI * r) - log_gamma(1.0 - 0.5 * q + kI * r));
        const Complex dn = std::exp(log_gamma(0.5 * q - kI * r) - log_gamma(1.0 - 0.5 * q - kI * r));
        sum += rule.weights[j] * grid.values[k][j] * (up - dn) * r;
    }
    const double r_max = rule.nodes.empty() ? 0.0 : rule.nodes.back();
    // |R(r) - R(-r)| r <= 2 r^{Re q} for large r.
    const double tail = std::abs(pref) * 2.0 * grid.tail * std::pow(std::max(r_max, 1.0), q.real());
    return {pref * sum, tail, static_cast<int>(rule.nodes.size())};
}

quad::Result<Complex> gamma_formula(const HGrid& grid, const Eigen::VectorXcd& q) {
    if (q.size() != grid.degree()) fail(ErrorKind::Domain, "s_k must have n entries");
    require_strip(q);
    if (grid.amplitude == 0.0) return {};
    if (grid.tail > 1e-8) fail(ErrorKind::Accuracy, "h grid tail too large for the Gamma formula");
    quad::Result<Complex> out{grid.amplitude, 0.0, 0};
    double rel = 0.0;
    for (int k = 0; k < grid.degree(); ++k) {
        const auto f = gamma_moment(grid, k, q[k]);
        out.value *= f.value;
        rel += f.error / std::max(std::abs(f.value), 1e-300);
        out.evaluations += f.evaluations;
    }
    out.error = rel * std::abs(out.value);
    return out;
}

}  // namespace

quad::Result<Complex> F0_gamma_formula(const HGrid& grid, const Eigen::VectorXcd& s_k) { return gamma_formula(grid, s_k); }

quad::Result<Complex> F0tilde_gamma_formula(const HGrid& grid, const Eigen::VectorXcd& s_k) {
    return gamma_formula(grid, (1.0 - s_k.array()).matrix());
}

TermResult parabolic_term(double A, const TransformTriple& triple, const AutomorphicFormData& form,
                          const TraceOptions& opt) {
    form.validate();
    if (!(A > 0)) fail(ErrorKind::Domain, "A must be positive");
    TermResult out;
    out.a_dependent = true;
    const int n = form.degree();
    const Complex s = form.s;
    const bool delta = form.m_u.isZero();
    const Eigen::VectorXcd sk = form.eigen_exponents();
    const double g0 = triple.g(Eigen::VectorXd::Zero(n));
    for (const auto& c : form.cusps) {
        if (c.eta == 0.0 && c.phi == 0.0) continue;
        const MultiplierGroup& M = c.frame.multipliers;
        if (delta) {
            const double scale = std::abs(M.det_E) / n * g0;
            out.a_s_coeff += scale * c.eta / s;
            out.a_1ms_coeff += scale * c.phi / (1.0 - s);
        }
        const double vol = covolume(c.frame.lattice);
        const ZetaContext ctx = ZetaContext::make(c.frame.lattice, M, form.m_u);
        out.components.emplace_back(c.name + ": vol", vol);
        if (c.eta != 0.0) {
            const Complex F = F0_direct(triple.source(), sk, opt);
            const ZetaValue z = zeta_continued(ctx.with_character(-form.m_u), 1.0 - s);
            out.constant += vol * c.eta * z.value * F;
            out.error_estimate += std::abs(vol * c.eta * F) * z.error_estimate;
            out.components.emplace_back(c.name + ": F(0)", F);
            out.components.emplace_back(c.name + ": Z(1-s, -m_u)", z.value);
        }
        if (c.phi != 0.0) {
            const Complex Ft = F0tilde_direct(triple.source(), sk, opt);
            const ZetaValue z = zeta_continued(ctx, s);
            out.constant += vol * c.phi * z.value * Ft;
            out.error_estimate += std::abs(vol * c.phi * Ft) * z.error_estimate;
            out.components.emplace_back(c.name + ": F~(0)", Ft);
            out.components.emplace_back(c.name + ": Z(s, m_u)", z.value);
        }
    }
    if (delta) out.components.emplace_back("g(0)", g0);
    out.value = out.constant + out.a_s_coeff * std::pow(Complex(A), s) + out.a_1ms_coeff * std::pow(Complex(A), 1.0 - s);
    return out;
}

ClassInventory demo_inventory(const FieldEmbedding& k, const TransformTriple& triple, const AutomorphicFormData& form,
                              const TraceOptions& opt) {
    if (k.radicand != 2 && k.radicand != 5) fail(ErrorKind::Unsupported, "demo inventories exist for Q(sqrt 2) and Q(sqrt 5)");
    auto fe = [](std::int64_t a, std::int64_t b) { return FieldElement::from_ints(a, b); };
    auto u_at = [&](const PointN& z) { return form.u ? form.u(z) : Complex(0.0); };
    ClassInventory inv;
    struct Seed {
        std::string label;
        FieldElement trace;
        int order;
    };
    std::vector<Seed> seeds = {{"S = [[0,-1],[1,0]]", fe(0, 0), 2}, {"[[0,-1],[1,1]]", fe(1, 0), 3}};
    if (k.radicand == 2) seeds.push_back({"[[0,-1],[1,sqrt 2]]", fe(0, 1), 4});
    const PointN i2 = PointN::Constant(2, kI);
    for (const auto& seed : seeds) {
        const auto g = GroupElementN::from_field(k, fe(0, 0), fe(-1, 0), fe(1, 0), seed.trace);
        const auto cls = classify(g);
        EllipticClass e;
        e.label = seed.label;
        e.angles = Eigen::Map<const Eigen::VectorXd>(cls.angles.data(), 2);
        e.centralizer_order = seed.order;
        e.u_at_fixed_point = u_at(act(centralizer_conjugator(g), i2));
        inv.elliptic.push_back(e);
    }
    // [[0,-1],[1,t]] with |t^(1)| > 2 > |t^(2)|: hyperbolic in the first coordinate, elliptic in the second.
    {
        const FieldElement t = k.radicand == 2 ? fe(1, 1) : fe(1, 1);
        const auto g = GroupElementN::from_field(k, fe(0, 0), fe(-1, 0), fe(1, 0), t);
        const auto cls = classify(g);
        if (cls.kind != ElementKind::Mixed || cls.coordinates[0] != CoordinateKind::Hyperbolic)
            fail(ErrorKind::Inconsistency, "demo mixed element has the wrong type");
        MixedClass mc;
        mc.label = "[[0,-1],[1," + t.to_string() + "]]";
        mc.norms = Eigen::VectorXd::Constant(1, cls.norms[0]);
        mc.angles = Eigen::VectorXd::Constant(1, cls.angles[0]);
        // The element is taken as the generator of its centralizer: P = [0, log N).
        Parallelotope cell{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, std::log(cls.norms[0])), false};
        mc.F0 = form.u ? F0_of_centralizer(form.u, centralizer_conjugator(g), cell, 1, opt) : Complex(0.0);
        inv.mixed.push_back(mc);
    }
    const MultiplierGroup& M = form.multipliers;
    const ModuleLattice ok = ring_of_integers_module(k);
    const FieldElement eps = fundamental_totally_positive_unit_exact(k);
    for (const auto& m : contributing_multipliers(M, triple)) {
        const FieldElement um = power(k, eps, m[0]);
        for (const auto& q : quotient_reps_mod_units(ok, um, eps)) {
            HypParClass h;
            h.label = "m = " + std::to_string(m[0]) + ", alpha = " + q.representative.to_string();
            h.m = m;
            h.cell = Parallelotope{Eigen::VectorXd::Zero(2), M.E.col(1), true};
            h.regularized_form = [](const Eigen::VectorXd& r) {
                const double nr = r.prod();
                return Complex(std::exp(-(nr + 1.0 / nr)));
            };
            inv.hyp_par.push_back(h);
        }
    }
    return inv;
}

TraceReport assemble_geometric_trace(double A, const TransformTriple& triple, const AutomorphicFormData& form,
                                     const ClassInventory& inventory, const TraceOptions& opt) {
    form.validate();
    const TestFunction& psi = triple.source();
    const Eigen::VectorXcd mu = form.eigenvalues();
    const int n = form.degree();
    TraceReport rep;
    rep.elliptic.components.clear();
    for (const auto& e : inventory.elliptic) {
        const auto t = elliptic_term(psi, e.angles, e.centralizer_order, e.u_at_fixed_point, mu, opt);
        rep.elliptic.value += t.value;
        rep.elliptic.error_estimate += t.error_estimate;
        rep.elliptic.components.emplace_back(e.label, t.value);
    }
    rep.elliptic.constant = rep.elliptic.value;
    for (const auto& c : inventory.mixed) {
        // Hyperbolic coordinates first in the eigenvalue vector as well.
        const auto t = mixed_term(psi, c.norms, c.angles, c.F0, mu, opt);
        rep.mixed.value += t.value;
        rep.mixed.error_estimate += t.error_estimate;
        rep.mixed.components.emplace_back(c.label, t.value);
    }
    rep.mixed.constant = rep.mixed.value;
    rep.parabolic = parabolic_term(A, triple, form, opt);
    rep.hyp_par = hyp_par_main_term(A, triple, form);
    for (const auto& h : inventory.hyp_par) {
        const Eigen::VectorXd E = hyp_par_E(form.multipliers, h.m);
        const Complex theta = hyp_par_theta_factor(psi, E, mu, true, opt);
        const auto c = hyp_par_C_term(theta, h.regularized_form, h.cell, opt);
        rep.hyp_par.constant += c.value;
        rep.hyp_par.value += c.value;
        rep.hyp_par.error_estimate += c.error_estimate;
        rep.hyp_par.components.emplace_back("C: " + h.label, c.value);
    }
    TermResult& tot = rep.total;
    tot.a_dependent = true;
    for (const TermResult* t : {&rep.elliptic, &rep.mixed, &rep.parabolic, &rep.hyp_par}) {
        tot.value += t->value;
        tot.constant += t->constant;
        tot.a_s_coeff += t->a_s_coeff;
        tot.a_1ms_coeff += t->a_1ms_coeff;
        tot.error_estimate += t->error_estimate;
    }
    tot.components = {{"elliptic", rep.elliptic.value},
                      {"mixed", rep.mixed.value},
                      {"parabolic", rep.parabolic.value},
                      {"hyperbolic-parabolic", rep.hyp_par.value}};
    (void)n;
    return rep;
}

}  // namespace hmf
