#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "hmftrace/quadrature.hpp"

namespace hmf {

using Complex = std::complex<double>;

/// Product bump psi(t) = amplitude * prod_k phi((t_k - c_k) / w_k), phi(x) = exp(-1 / (1 - x^2)) on |x| < 1.
/// Arguments t_k < 0 are outside the domain of every kernel argument and evaluate to 0.
struct TestFunction {
    Eigen::VectorXd centers;
    Eigen::VectorXd widths;
    double amplitude = 1.0;

    static TestFunction bump(Eigen::VectorXd centers, Eigen::VectorXd widths, double amplitude = 1.0);
    /// Centers and widths 4.5, i.e. support [0, 9]^n.
    static TestFunction standard(int n);
    static TestFunction zero(int n);

    int degree() const { return static_cast<int>(centers.size()); }
    bool is_zero() const { return amplitude == 0.0; }
    double operator()(const Eigen::VectorXd& t) const;
    /// One-dimensional factor phi((t - c_k) / w_k), without the amplitude.
    double factor(int k, double t) const;
    double support_lower(int k) const;
    double support_upper(int k) const;
};

/// Samples of h on composite Gauss-Legendre nodes of [0, r_max] in every coordinate.
/// h(r) = amplitude * prod_k values[k](r_k).
struct HGrid {
    double amplitude = 0.0;
    std::vector<quad::Rule> rules;
    std::vector<std::vector<double>> values;
    /// Estimated integral of |h| beyond r_max, summed over coordinates.
    double tail = 0.0;

    int degree() const { return static_cast<int>(rules.size()); }
};

/// The chain psi -> Q -> g -> h for a product test function, with per-coordinate g samples cached.
class TransformTriple {
public:
    explicit TransformTriple(TestFunction psi, double tolerance = 1e-12);

    const TestFunction& source() const { return psi_; }
    double tolerance() const { return tol_; }
    int degree() const { return psi_.degree(); }

    double Q(const Eigen::VectorXd& w) const;
    double g(const Eigen::VectorXd& u) const;
    double h(const Eigen::VectorXd& r) const;

    /// One-dimensional factors (without the amplitude).
    double Q1(int k, double w) const;
    double g1(int k, double u) const;
    double h1(int k, double r) const;

    /// g vanishes for |u_k| >= g_support(k).
    double g_support(int k) const;

    HGrid h_grid(double r_max = 1000.0, double panel = 1.0, int order = 20) const;

private:
    struct Axis {
        quad::Rule nodes;  // on [0, U]
        std::vector<double> g;
    };
    TestFunction psi_;
    double tol_;
    std::vector<std::shared_ptr<const Axis>> axes_;
};

double Q_of(const TestFunction& psi, const Eigen::VectorXd& w);
double g_of(const TestFunction& psi, const Eigen::VectorXd& u);
Complex h_of(const TestFunction& psi, const Eigen::VectorXd& r);

/// Fourier inversion of sampled h. Accuracy error if the grid tail exceeds `tol`.
double g_from_h(const HGrid& grid, const Eigen::VectorXd& u, double tol = 1e-5);

using QFunction = std::function<double(const Eigen::VectorXd&)>;

/// psi(t) = (-1)^n / pi^n * integral over w >= t of d^nQ/dw_1..dw_n / prod sqrt(w_k - t_k).
/// The mixed derivative uses central differences with the given per-coordinate steps;
/// Q must vanish for w_k >= support_upper[k].
quad::Result<double> psi_from_Q(const QFunction& q, const Eigen::VectorXd& t, const Eigen::VectorXd& support_upper,
                                const Eigen::VectorXd& step);

/// Same, with steps 1e-3 * width; accuracy error when differentiation noise dominates.
double psi_from_Q(const TransformTriple& triple, const Eigen::VectorXd& t);

}  // namespace hmf
