#include "hmftrace/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hmftrace/error.hpp"
#include "hmftrace/quadrature.hpp"

namespace hmf {

namespace {

constexpr double kPi = std::numbers::pi;

constexpr double kLanczos[9] = {0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
                                771.32342877765313,      -176.61502916214059,   12.507343278686905,
                                -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// log Gamma for Re z >= 1/2, Lanczos g = 7.
Complex lanczos_log_gamma(Complex z) {
    z -= 1.0;
    Complex x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + static_cast<double>(i));
    const Complex t = z + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(x);
}

// log sin(pi z) without overflow for large |Im z|.
Complex log_sin_pi(Complex z) {
    const Complex I(0.0, 1.0);
    if (std::abs(z.imag()) < 15.0) return std::log(std::sin(kPi * z));
    if (z.imag() > 0)
        return std::log(0.5 * I) - I * kPi * z + std::log(1.0 - std::exp(2.0 * I * kPi * z));
    return std::log(-0.5 * I) + I * kPi * z + std::log(1.0 - std::exp(-2.0 * I * kPi * z));
}

void check_pole(Complex z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real())) {
        std::ostringstream msg;
        msg << "Gamma has a pole at " << z.real();
        fail(ErrorKind::Pole, msg.str());
    }
}

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double kAbsTol = 1e-11;
constexpr double kRelTol = 1e-11;
constexpr double kRadialStart = 1e-3;
// Bounds the step so the quartic dense output stays accurate in its derivative.
// The angular bound shrinks with cos(theta), the length scale of the coefficient 1/cos^2.
constexpr double kMaxStep = 0.05;

using State = std::array<Complex, 2>;

State axpy(const State& y, std::initializer_list<std::pair<double, const State*>> terms, double h) {
    State out = y;
    for (const auto& [c, k] : terms) {
        out[0] += h * c * (*k)[0];
        out[1] += h * c * (*k)[1];
    }
    return out;
}

// Taylor continuation for (q + x^2) y'' + 2x y' - mu y = 0 from x0 to x1 (x1 >= x0).
// q = -1 is the Legendre equation in cosh r, q = +1 the angular equation in tan theta.
State legendre_continue(double q, Complex mu, double x0, State y, double x1) {
    while (x0 < x1) {
        const double radius = q > 0 ? std::sqrt(1.0 + x0 * x0) : x0 - 1.0;
        const double h = std::min(0.5 * radius, x1 - x0);
        const double p0 = q + x0 * x0;
        // b_k = a_k h^k for the expansion around x0.
        Complex b_prev = y[0], b = y[1] * h;
        Complex value = b_prev + b, deriv = y[1];
        for (int k = 0; k < 2000; ++k) {
            const double kk = k;
            const Complex next = (-2.0 * x0 * (kk + 1) * (kk + 1) * b * h - (kk * (kk + 1) - mu) * b_prev * h * h) /
                                 (p0 * (kk + 2) * (kk + 1));
            value += next;
            deriv += (kk + 2) * next / h;
            b_prev = b;
            b = next;
            if (k > 4 && std::abs(b) + std::abs(b_prev) < 1e-18 * (std::abs(value) + 1e-300)) break;
        }
        y = {value, deriv};
        x0 += h;
    }
    return y;
}

void check_angle(double theta) {
    if (!(std::abs(theta) < kPi / 2)) {
        std::ostringstream msg;
        msg << "angular spherical function needs |theta| < pi/2, got " << theta;
        fail(ErrorKind::Domain, msg.str());
    }
}

}  // namespace

Complex log_gamma(Complex z) {
    check_pole(z);
    if (z.real() >= 0.5) return lanczos_log_gamma(z);
    return std::log(kPi) - log_sin_pi(z) - lanczos_log_gamma(1.0 - z);
}

Complex complex_gamma(Complex z) {
    check_pole(z);
    if (z.real() >= 0.5) return std::exp(lanczos_log_gamma(z));
    return kPi / (std::sin(kPi * z) * std::exp(lanczos_log_gamma(1.0 - z)));
}

Complex bessel_k(Complex nu, double x) {
    if (!(x > 0)) {
        std::ostringstream msg;
        msg << "bessel_k needs x > 0, got " << x;
        fail(ErrorKind::Domain, msg.str());
    }
    // Truncate where x (cosh T - 1) - |Re nu| T = 45, i.e. the integrand is e^{-45} below its value at 0.
    const double alpha = std::abs(nu.real());
    auto excess = [&](double t) { return x * (std::cosh(t) - 1.0) - alpha * t - 45.0; };
    double hi = 1.0;
    while (excess(hi) < 0) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0 ? lo : hi) = mid;
    }
    auto f = [&](double t) { return std::exp(-x * std::cosh(t)) * std::cosh(nu * t); };
    quad::Options opt;
    opt.rel_tol = 1e-14;
    opt.abs_tol = 1e-16 * std::exp(-x);
    opt.max_intervals = 20000;
    return quad::integrate<Complex>(f, 0.0, hi, opt).value;
}

SphericalSolution::SphericalSolution(Kind kind, Complex mu, double x_max) : kind_(kind), mu_(mu), x_max_(x_max) {
    const Complex I0 = 0.0;
    if (kind == Kind::Radial) {
        if (!(x_max >= 0)) fail(ErrorKind::Domain, "radial spherical function needs r >= 0");
        x_start_ = std::min(kRadialStart, x_max);
        const double r = x_start_;
        const Complex a = mu / 4.0, b = mu * (mu - 2.0 / 3.0) / 64.0;
        start_ = {1.0 + a * r * r + b * r * r * r * r, 2.0 * a * r + 4.0 * b * r * r * r};
    } else {
        check_angle(x_max);
        x_start_ = 0.0;
        start_ = kind == Kind::Angular ? State{1.0, I0} : State{I0, 1.0};
    }

    auto rhs = [&](double x, const State& y) -> State {
        if (kind_ == Kind::Radial) return {y[1], mu_ * y[0] - y[1] / std::tanh(x)};
        const double c = std::cos(x);
        return {y[1], mu_ * y[0] / (c * c)};
    };

    grid_.push_back(x_start_);
    double x = x_start_;
    State y = start_;
    double h = std::min(1e-2, std::max(x_max_ - x, 0.0));
    State k1 = rhs(x, y);
    int rejected = 0;
    while (x < x_max_) {
        h = std::min(h, kind_ == Kind::Radial ? kMaxStep : kMaxStep * std::cos(x));
        if (x + h > x_max_) h = x_max_ - x;
        if (h < 1e-14 * std::max(1.0, x)) fail(ErrorKind::Numeric, "spherical ODE step size underflow");
        const State k2 = rhs(x + c2 * h, axpy(y, {{a21, &k1}}, h));
        const State k3 = rhs(x + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
        const State k4 = rhs(x + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
        const State k5 = rhs(x + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
        const State k6 = rhs(x + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
        const State y1 = axpy(y, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}}, h);
        const State k7 = rhs(x + h, y1);
        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const Complex e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc = kAbsTol + kRelTol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += std::norm(e / sc);
        }
        err = std::sqrt(err / 2.0);
        if (err <= 1.0) {
            Step s{x, h, {}};
            for (int i = 0; i < 2; ++i) {
                const Complex dy = y1[i] - y[i];
                const Complex bspl = h * k1[i] - dy;
                s.rcont[0][i] = y[i];
                s.rcont[1][i] = dy;
                s.rcont[2][i] = bspl;
                s.rcont[3][i] = dy - h * k7[i] - bspl;
                s.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
            }
            steps_.push_back(s);
            x = (x + h >= x_max_) ? x_max_ : x + h;
            y = y1;
            k1 = k7;
            grid_.push_back(x);
            rejected = 0;
        } else if (++rejected > 50) {
            fail(ErrorKind::Numeric, "spherical ODE integrator rejected too many steps");
        }
        const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        h *= err <= 1.0 ? factor : std::min(factor, 1.0);
    }
}

SphericalSolution SphericalSolution::radial(Complex mu, double r_max) {
    return SphericalSolution(Kind::Radial, mu, r_max);
}

SphericalSolution SphericalSolution::angular(Complex mu, double theta_max) {
    return SphericalSolution(Kind::Angular, mu, theta_max);
}

SphericalSolution SphericalSolution::angular_odd(Complex mu, double theta_max) {
    return SphericalSolution(Kind::AngularOdd, mu, theta_max);
}

SphericalSolution::State SphericalSolution::eval(double x) const {
    const double ax = std::abs(x);
    if (ax > x_max_ * (1 + 1e-14)) {
        std::ostringstream msg;
        msg << "spherical solution evaluated at " << x << " beyond its range " << x_max_;
        fail(ErrorKind::Domain, msg.str());
    }
    State y;
    if (ax <= x_start_ || steps_.empty()) {
        if (kind_ == Kind::Radial) {
            const Complex a = mu_ / 4.0, b = mu_ * (mu_ - 2.0 / 3.0) / 64.0;
            y = {1.0 + a * ax * ax + b * ax * ax * ax * ax, 2.0 * a * ax + 4.0 * b * ax * ax * ax};
        } else {
            y = start_;
        }
    } else {
        auto it = std::upper_bound(steps_.begin(), steps_.end(), ax,
                                   [](double v, const Step& s) { return v < s.x0; });
        const Step& s = *std::prev(it);
        const double t = std::clamp((ax - s.x0) / s.h, 0.0, 1.0);
        const double t1 = 1.0 - t;
        for (int i = 0; i < 2; ++i)
            y[i] = s.rcont[0][i] +
                   t * (s.rcont[1][i] + t1 * (s.rcont[2][i] + t * (s.rcont[3][i] + t1 * s.rcont[4][i])));
    }
    if (x < 0) {
        if (kind_ == Kind::AngularOdd)
            y[0] = -y[0];
        else
            y[1] = -y[1];
    }
    return y;
}

Complex SphericalSolution::value(double x) const { return eval(x)[0]; }

Complex SphericalSolution::derivative(double x) const { return eval(x)[1]; }

Complex spherical_g(Complex mu, double r) {
    const double ar = std::abs(r);
    return SphericalSolution::radial(mu, ar).value(ar);
}

Complex spherical_g_series(Complex mu, double r) {
    const double ar = std::abs(r);
    // 2F1(a, b; 1; z) with a + b = 1, ab = -mu, z = -sinh^2(r/2): converges well for r <= 1.
    const double r0 = std::min(ar, 1.0);
    const double z = -std::pow(std::sinh(0.5 * r0), 2);
    Complex term = 1.0, sum = 1.0, dsum = 0.0;
    for (int k = 0; k < 500; ++k) {
        const double kk = k;
        term *= (kk * (kk + 1) - mu) / ((kk + 1) * (kk + 1)) * z;
        sum += term;
        if (z != 0.0) dsum += (kk + 1) * term / z;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    if (ar <= 1.0) return sum;
    const double t0 = std::cosh(r0);
    // d/dt of 2F1 at z = (1 - t)/2.
    const State y = legendre_continue(-1.0, mu, t0, {sum, -0.5 * dsum}, std::cosh(ar));
    return y[0];
}

Complex angular_f(Complex mu, double theta) {
    check_angle(theta);
    const double at = std::abs(theta);
    return SphericalSolution::angular(mu, at).value(at);
}

Complex angular_f_series(Complex mu, double theta) {
    check_angle(theta);
    return legendre_continue(1.0, mu, 0.0, {1.0, 0.0}, std::tan(std::abs(theta)))[0];
}

Complex angular_f_odd(Complex mu, double theta) {
    check_angle(theta);
    return SphericalSolution::angular_odd(mu, std::abs(theta)).value(theta);
}

}  // namespace hmf
