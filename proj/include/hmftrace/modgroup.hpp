#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmftrace/field.hpp"
#include "hmftrace/group_element.hpp"
#include "hmftrace/lattice.hpp"
#include "hmftrace/transforms.hpp"

namespace hmf {

enum class ElementKind { Identity, TotallyElliptic, TotallyParabolic, TotallyHyperbolic, HyperbolicParabolic, Mixed };
enum class CoordinateKind { Identity, Elliptic, Parabolic, Hyperbolic };

const char* element_kind_name(ElementKind kind) noexcept;

struct ClassificationResult {
    ElementKind kind = ElementKind::Identity;
    std::vector<CoordinateKind> coordinates;
    /// theta in (0, pi) for each elliptic coordinate, in coordinate order; gamma^(k) ~ R(theta).
    std::vector<double> angles;
    /// N > 1 for each hyperbolic coordinate, in coordinate order; gamma^(k) ~ diag(N^{1/2}, N^{-1/2}).
    std::vector<double> norms;
    /// Hyperbolic-parabolic only: a cusp fixed by gamma, as (p : q) in P^1(K); q = 0 is infinity.
    FieldElement cusp_p, cusp_q;
    /// Hyperbolic-parabolic only: the embedded unit u with gamma ~ [[u^{1/2}, *], [0, u^{-1/2}]] at that cusp,
    /// oriented so that |u^(1)| > 1.
    Eigen::VectorXd multiplier;
};

/// Per-coordinate trace test with a 1e-9 band around |tr| = 2. Inside the band the exact entries decide;
/// without them the result is an ambiguous-classification error.
ClassificationResult classify(const GroupElementN& g);

/// k(z, w) = psi(|z_k - w_k|^2 / (Im z_k Im w_k)).
double kernel_k(const TestFunction& psi, const PointN& z, const PointN& w);

/// sum over the given elements of k(z, gamma w).
double automorphic_kernel_partial(const TestFunction& psi, const std::vector<GroupElementN>& elements, const PointN& z,
                                  const PointN& w);

struct EnumerationOptions {
    std::size_t max_elements = 200000;
};

/// All PSL(2, O_K) elements whose entries satisfy |x^(k)| <= height_bound in every embedding; n = 2.
std::vector<GroupElementN> enumerate_group_elements(const FieldEmbedding& k, double height_bound,
                                                    const EnumerationOptions& opt = {});

/// A coset representative of Gamma_infinity \ Gamma, stored as the bottom row (c, d) in integral-basis coordinates.
struct CosetPair {
    std::int64_t c[2];
    std::int64_t d[2];
};

struct EisensteinValue {
    Complex value;
    /// kappa X^{1 - Re s} / (Re s - 1), kappa estimated from the terms with X/2 < N_z(c, d) <= X.
    double tail_estimate = 0.0;
    std::size_t terms = 0;
};

/// Coprime pairs (c, d), c != 0, modulo units with N_z(c, d) = prod_k |c_k z_k + d_k|^2 / y_k <= bound.
std::vector<CosetPair> eisenstein_pairs(const FieldEmbedding& k, const PointN& z, double bound);

/// E(z, s, m) = sum over Gamma_infinity \ Gamma of prod_k Im(gamma z)_k^{s_k}, truncated at N_z(c, d) <= bound,
/// with s_k from exponents_from on the squares of units. Re s > 1.
EisensteinValue eisenstein_direct(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m, const PointN& z,
                                  double bound = 1e4);

/// The same series over a fixed list of pairs (plus the c = 0 term); used for finite differences in z.
Complex eisenstein_partial(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m, const PointN& z,
                           const std::vector<CosetPair>& pairs);

}  // namespace hmf
