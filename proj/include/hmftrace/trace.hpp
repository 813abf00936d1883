#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hmftrace/field.hpp"
#include "hmftrace/group_element.hpp"
#include "hmftrace/lattice.hpp"
#include "hmftrace/quadrature.hpp"
#include "hmftrace/transforms.hpp"

namespace hmf {

using Evaluator = std::function<Complex(const PointN&)>;

/// Zeroth Fourier coefficient data of u at one cusp: a(y) = eta prod y_k^{s_k} + phi prod y_k^{1 - s_k}.
struct CuspCoefficients {
    std::string name;
    CuspFrame frame;
    Complex eta = 0.0;
    Complex phi = 0.0;
};

struct AutomorphicFormData {
    Complex s = 0.5;
    Eigen::VectorXi m_u;
    std::vector<CuspCoefficients> cusps;
    Evaluator u;
    MultiplierGroup multipliers;

    int degree() const { return multipliers.degree(); }
    bool is_cusp_form() const;
    /// s_k = s + 2 pi i sum_j (m_u)_j e_j^(k).
    Eigen::VectorXcd eigen_exponents() const;
    /// lambda_k = s_k (s_k - 1), the Laplacian eigenvalue in coordinate k.
    Eigen::VectorXcd eigenvalues() const;
    /// Checks the shape, m_u = 0 for a cusp form, and 0 < Re s < 1 unless relaxed.
    void validate(bool relax_strip = false) const;
};

/// u = eta y^s lambda_{m}(y) at the cusp infinity, i.e. the constant term of the Eisenstein series there.
/// It is an eigenfunction with the right eigenvalues; the Eisenstein series itself is not continued into 0 < Re s < 1.
AutomorphicFormData demo_eisenstein_form(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m_u);
AutomorphicFormData cusp_form_zero(const FieldEmbedding& k);

/// value = constant + a_s_coeff A^s + a_1ms_coeff A^{1-s}.
struct TermResult {
    Complex value = 0.0;
    Complex constant = 0.0;
    Complex a_s_coeff = 0.0;
    Complex a_1ms_coeff = 0.0;
    bool a_dependent = false;
    double error_estimate = 0.0;
    std::vector<std::pair<std::string, Complex>> components;
};

/// {anchor + G t : t in [0, 1)^k}, or with diagonal_line also + tau (1, ..., 1) / sqrt(n) for all real tau.
struct Parallelotope {
    Eigen::VectorXd anchor;
    Eigen::MatrixXd generators;
    bool diagonal_line = false;

    int dimension() const { return static_cast<int>(anchor.size()); }
    /// |det| of the parametrization (including the unit diagonal direction when present).
    double jacobian() const;
};

/// Options shared by the quadratures of this module.
struct TraceOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    /// Trapezoid nodes per angle in the brute-force oracles.
    int angle_nodes = 32;
};

/// (2 pi)^n / m_gamma u(z_gamma) prod_k int_0^R psi_k(S(r, theta_k)) g_{mu_k}(r) sinh r dr, S = (2 sinh r sin theta)^2.
TermResult elliptic_term(const TestFunction& psi, const Eigen::VectorXd& angles, int m_gamma, Complex u_at_fixed_point,
                         const Eigen::VectorXcd& mu, const TraceOptions& opt = {});

/// int over H^n of k(z, gamma z) u(z) dmu(z) in geodesic polar coordinates about the fixed point of gamma.
quad::Result<Complex> elliptic_oracle(const TestFunction& psi, const GroupElementN& gamma, const Evaluator& u,
                                      const TraceOptions& opt = {});

/// Mixed or totally hyperbolic class with the hyperbolic coordinates first:
/// (2 pi)^{n-m} F0 prod_{k<=m} int psi_k(N(theta)) f_{mu_k}(theta) dtheta / cos^2 theta prod_{k>m} (elliptic factor),
/// N(theta) = (N_k + 1/N_k - 2) / cos^2 theta.
TermResult mixed_term(const TestFunction& psi, const Eigen::VectorXd& norms, const Eigen::VectorXd& angles, Complex F0,
                      const Eigen::VectorXcd& mu, const TraceOptions& opt = {});

/// int over 1 <= |z_1| < period, z_2 in H of k(z, nu z) u(z) dmu for n = 2 with nu = (D(N), elliptic);
/// the second coordinate uses geodesic polar coordinates about the fixed point of nu^(2).
quad::Result<Complex> mixed_oracle(const TestFunction& psi, const GroupElementN& nu, double period, const Evaluator& u,
                                   const TraceOptions& opt = {});

/// int over log r in P of u(rho^(1)(r_1 i), ..., rho^(m)(r_m i), rho^(m+1) i, ...) prod dr_k / r_k.
Complex F0_of_centralizer(const Evaluator& u, const GroupElementN& rho, const Parallelotope& cell, int hyperbolic,
                          const TraceOptions& opt = {});

/// Conjugator rho with rho^{-1} gamma rho = (D(N_1), ..., R(theta), ...) for gamma with its hyperbolic coordinates
/// first: the repelling/attracting fixed points go to 0/infinity, an elliptic fixed point goes to i.
GroupElementN centralizer_conjugator(const GroupElementN& gamma);

/// E_m = u_m^{-1/2} - u_m^{1/2} for u_m = prod eps_j^{m_j}.
Eigen::VectorXd hyp_par_E(const MultiplierGroup& M, const Eigen::VectorXi& m);

/// The m != 0 with g(log u_m) != 0, found by walking shells of Z^{n-1} until the support of g is left.
std::vector<Eigen::VectorXi> contributing_multipliers(const MultiplierGroup& M, const TransformTriple& triple);

/// (|det E| / n) sum_kappa (eta A^s / s + phi A^{1-s} / (1-s)) sum_{m != 0} g(log u_m), times [m_u = 0].
TermResult hyp_par_main_term(double A, const TransformTriple& triple, const AutomorphicFormData& form);

/// int psi(E_m^2 / cos^2 theta) prod f_{mu_k}(theta_k) dtheta_k / cos^2 theta_k over (-pi/2, pi/2)^n.
/// With fold the even integrand is integrated over [0, pi/2) and doubled.
Complex hyp_par_theta_factor(const TestFunction& psi, const Eigen::VectorXd& E_m, const Eigen::VectorXcd& mu,
                             bool fold = true, const TraceOptions& opt = {});

using RegularizedForm = std::function<Complex(const Eigen::VectorXd&)>;

/// 1/2 int over log r in P of u~(r i) prod dr_k / r_k, times theta_factor. Along an unbounded diagonal direction
/// the integral is extended until it settles; growth raises a non-integrable error.
TermResult hyp_par_C_term(Complex theta_factor, const RegularizedForm& form, const Parallelotope& cell,
                          const TraceOptions& opt = {});

/// F(0) = int over (R^+)^n of psi(t^2) prod t_k^{-s_k} dt_k and F~(0) with t_k^{s_k - 1}; 0 < Re s_k < 1.
Complex F0_direct(const TestFunction& psi, const Eigen::VectorXcd& s_k, const TraceOptions& opt = {});
Complex F0tilde_direct(const TestFunction& psi, const Eigen::VectorXcd& s_k, const TraceOptions& opt = {});

/// F(0) from h: prod_k i / (2^{2+s_k} pi^2) Gamma((1-s_k)/2)^2 int_0^inf h_k(r) [R(r) - R(-r)] r dr,
/// R(r) = Gamma(s_k/2 + ir) / Gamma(1 - s_k/2 + ir). F~(0) is the same with s_k -> 1 - s_k.
quad::Result<Complex> F0_gamma_formula(const HGrid& grid, const Eigen::VectorXcd& s_k);
quad::Result<Complex> F0tilde_gamma_formula(const HGrid& grid, const Eigen::VectorXcd& s_k);

/// sum over cusps of [m_u = 0] (|det E| / n)(eta A^s / s + phi A^{1-s} / (1-s)) g(0)
///   + vol(R^n / t_kappa)(eta Z_kappa(1-s, -m_u) F(0) + phi Z_kappa(s, m_u) F~(0)).
TermResult parabolic_term(double A, const TransformTriple& triple, const AutomorphicFormData& form,
                          const TraceOptions& opt = {});

struct EllipticClass {
    std::string label;
    Eigen::VectorXd angles;
    int centralizer_order = 1;
    Complex u_at_fixed_point = 0.0;
};

struct MixedClass {
    std::string label;
    Eigen::VectorXd norms;
    Eigen::VectorXd angles;
    Complex F0 = 0.0;
};

struct HypParClass {
    std::string label;
    Eigen::VectorXi m;
    Parallelotope cell;
    RegularizedForm regularized_form;
};

struct ClassInventory {
    std::vector<EllipticClass> elliptic;
    std::vector<MixedClass> mixed;
    std::vector<HypParClass> hyp_par;
};

/// Small known classes for Q(sqrt 2) and Q(sqrt 5): elliptic classes of orders 2 and 3 (and 4 over Q(sqrt 2)),
/// one mixed class, and hyperbolic-parabolic classes for the contributing m with a synthetic decaying
/// regularized form exp(-(Nr + 1/Nr)).
ClassInventory demo_inventory(const FieldEmbedding& k, const TransformTriple& triple, const AutomorphicFormData& form,
                              const TraceOptions& opt = {});

struct TraceReport {
    TermResult elliptic, mixed, parabolic, hyp_par, total;
};

/// Tr_u^A K = Sigma_ell + Sigma_mix + Sigma_par + Sigma_hyp-par, without the o(A) remainders.
TraceReport assemble_geometric_trace(double A, const TransformTriple& triple, const AutomorphicFormData& form,
                                     const ClassInventory& inventory, const TraceOptions& opt = {});

}  // namespace hmf
