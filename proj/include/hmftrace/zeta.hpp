#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hmftrace/field.hpp"
#include "hmftrace/lattice.hpp"

namespace hmf {

/// Lattice L, multiplier group M acting on it, and the character index m of Z_{L,M}(s, m).
struct ZetaContext {
    EmbeddedLattice lattice;
    MultiplierGroup multipliers;
    Eigen::VectorXi m;

    /// Checks eps (.) L in L on basis vectors and that L has no nonzero vector of norm zero.
    static ZetaContext make(EmbeddedLattice lattice, MultiplierGroup multipliers, Eigen::VectorXi m);

    int degree() const { return lattice.degree(); }
    bool trivial_character() const { return m.isZero(); }
    /// Dual lattice, same multipliers, character -m.
    ZetaContext dual() const;
    ZetaContext with_character(const Eigen::VectorXi& index) const;
};

/// O_K with the squares of units; m given as an (n-1)-vector.
ZetaContext hilbert_zeta_context(const FieldEmbedding& k, const Eigen::VectorXi& m);
ZetaContext hilbert_zeta_context(const FieldEmbedding& k, int m = 0);

/// The order Z + f O_K with M generated by the least power of the fundamental totally positive unit
/// preserving it. For f > 1 the order may lack a unit of norm -1, so Z(s, m) need not vanish for odd m.
ZetaContext order_zeta_context(const FieldEmbedding& k, int conductor, int m);

/// Calls f(coefficients, vector) for every nonzero lattice vector with sum_k weights_k v_k^2 <= bound.
void for_each_short_vector(const EmbeddedLattice& lattice, const Eigen::VectorXd& weights, double bound,
                           const std::function<void(const Eigen::VectorXi&, const Eigen::VectorXd&)>& f);

/// Theta_L(x) = sum over l in L of exp(-pi sum_k x_k l_k^2); requires x_k > 0.
double theta(const EmbeddedLattice& lattice, const Eigen::VectorXd& x);

/// Theta_L(x) - 1 for complex x with Re x_k > 0.
Complex theta_minus_one(const EmbeddedLattice& lattice, const Eigen::VectorXcd& x);

struct ZetaValue {
    Complex value;
    double error_estimate = 0.0;
    std::string method;
};

struct DirectOptions {
    /// Norm scale of the smooth cutoff 1/2 erfc(log(|Nl| / base_norm) / eta).
    double base_norm = 2048.0;
    double eta = 0.5;
};

/// Direct lattice sum over orbit representatives in the fundamental cell with a smooth norm cutoff;
/// for m = 0 the exactly known contribution of the main term beyond the cutoff is added. Re s > 1.
ZetaValue zeta_direct(const ZetaContext& ctx, Complex s, const DirectOptions& opt = {});

struct ContinuationOptions {
    /// The quotient integral is split at N x = split (> 0).
    double split = 1.0;
    /// Contour angle delta in (-pi/2, pi/2); chosen from Im s when absent.
    std::optional<double> rotation;
    /// Trapezoid nodes per multiplier coordinate; 0 chooses from m.
    int periodic_nodes = 0;
    double rel_tol = 1e-13;
};

/// Xi_{L,M}(s, m) = pi^{-ns/2} prod Gamma(s_k/2) Z(s, m) from incomplete theta integrals.
ZetaValue completed_xi(const ZetaContext& ctx, Complex s, const ContinuationOptions& opt = {});

/// Z(s, m) for all s except the poles s = 0, 1 when m = 0.
ZetaValue zeta_continued(const ZetaContext& ctx, Complex s, const ContinuationOptions& opt = {});

/// |LHS - RHS| / (|LHS| + |RHS|) for vol(L)^{1/2} Xi_L(s, m) = vol(L*)^{1/2} Xi_{L*}(1 - s, -m).
/// The two sides are computed with different split points.
double functional_equation_residual(const ZetaContext& ctx, Complex s);

/// Res_{s=1} Z(s, 0) = 2^n |det E| / (n vol(R^n / L)).
double residue_at_one(const ZetaContext& ctx);

struct ConvexityLine {
    double sigma = 0.0;
    double exponent = 0.0;
    double bound = 0.0;
    bool within_bound = false;
};

struct ConvexityReport {
    std::vector<double> t_grid;
    std::vector<ConvexityLine> lines;
    /// Fitted exponents decrease as sigma increases.
    bool monotone = false;
    /// max |Z(2 + it)| over the grid, and Z(2, 0).
    double max_on_line_two = 0.0;
    double z_two = 0.0;
};

/// Empirical growth exponents of |Z(sigma + it)| on sigma = 0.25, 0.5, 0.75 from a log-log fit of the
/// upper envelope over t_grid.
ConvexityReport convexity_spot_check(const ZetaContext& ctx, const std::vector<double>& t_grid);

}  // namespace hmf
