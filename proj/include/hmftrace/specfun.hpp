#pragma once

#include <array>
#include <complex>
#include <vector>

namespace hmf {

using Complex = std::complex<double>;

/// Gamma function for complex argument (Lanczos, reflection for Re z < 1/2).
/// Throws a pole error at nonpositive integers.
Complex complex_gamma(Complex z);

/// A branch of log Gamma(z); exp(log_gamma(z)) == complex_gamma(z). Safe for large |Im z|.
Complex log_gamma(Complex z);

/// K_nu(x) from the integral over t of exp(-x cosh t) cosh(nu t). Requires x > 0.
Complex bessel_k(Complex nu, double x);

/// Dense solution of one of the spherical ODEs on [0, x_max], state (y, y').
///
/// Radial:  g'' + coth(r) g' = mu g,      g(0) = 1.
/// Angular: f'' = mu / cos^2(theta) f,    f(0) = 1, f'(0) = 0 (or the odd solution 0, 1).
/// Both are extended to negative arguments by parity.
class SphericalSolution {
public:
    enum class Kind { Radial, Angular, AngularOdd };

    static SphericalSolution radial(Complex mu, double r_max);
    static SphericalSolution angular(Complex mu, double theta_max);
    static SphericalSolution angular_odd(Complex mu, double theta_max);

    Complex value(double x) const;
    Complex derivative(double x) const;

    Kind kind() const { return kind_; }
    Complex mu() const { return mu_; }
    double x_max() const { return x_max_; }
    /// Step endpoints of the integrator; value/derivative are exact integrator output there.
    const std::vector<double>& grid() const { return grid_; }

private:
    using State = std::array<Complex, 2>;
    struct Step {
        double x0, h;
        std::array<State, 5> rcont;
    };

    SphericalSolution(Kind kind, Complex mu, double x_max);
    State eval(double x) const;

    Kind kind_;
    Complex mu_;
    double x_max_;
    double x_start_ = 0.0;
    State start_{};
    std::vector<double> grid_;
    std::vector<Step> steps_;
};

/// g_mu(r) via Runge-Kutta (Dormand-Prince 5(4)).
Complex spherical_g(Complex mu, double r);
/// g_mu(r) via hypergeometric start and Taylor continuation of the Legendre equation in cosh r.
Complex spherical_g_series(Complex mu, double r);

/// f_mu(theta) via Runge-Kutta; domain error unless |theta| < pi/2.
Complex angular_f(Complex mu, double theta);
/// f_mu(theta) via Taylor continuation in tan(theta).
Complex angular_f_series(Complex mu, double theta);

/// Odd solution of the angular ODE: value 0 and derivative 1 at theta = 0.
Complex angular_f_odd(Complex mu, double theta);

}  // namespace hmf
