#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "hmftrace/field.hpp"
#include "hmftrace/group_element.hpp"

namespace hmf {

using IntMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;
using IntVector = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Full-rank lattice in R^n; the columns of basis are the basis vectors.
struct EmbeddedLattice {
    Eigen::MatrixXd basis;

    int degree() const { return static_cast<int>(basis.rows()); }
    Eigen::VectorXd coordinates(const Eigen::VectorXd& v) const;
    bool contains(const Eigen::VectorXd& v, double tol = 1e-8) const;
};

EmbeddedLattice make_lattice(const Eigen::MatrixXd& basis);
EmbeddedLattice ring_of_integers_lattice(const FieldEmbedding& k);
EmbeddedLattice dual_lattice(const EmbeddedLattice& lattice);
double covolume(const EmbeddedLattice& lattice);

/// True if no nonzero integer combination with coefficients bounded by `bound` has a vanishing coordinate.
bool zeta_eligible(const EmbeddedLattice& lattice, int bound = 20);

/// Product of the coordinates.
double vector_norm(const Eigen::VectorXd& v);

/// Rank n-1 group of totally positive norm-one multipliers.
struct MultiplierGroup {
    std::vector<Eigen::VectorXd> generators;
    Eigen::MatrixXd E;          // column 0 all ones, column j = log(generator j)
    Eigen::MatrixXd E_inverse;  // rows 1..n-1 are the vectors e_j
    double det_E = 0.0;

    int degree() const { return static_cast<int>(E.rows()); }
    int rank() const { return degree() - 1; }
};

MultiplierGroup make_multiplier_group(const std::vector<Eigen::VectorXd>& generators);

/// Multipliers of the Hilbert modular group: squares of units.
MultiplierGroup hilbert_multipliers(const FieldEmbedding& k);

/// Coordinates c_j = sum_k e_j^(k) log|v_k|, j = 1..n-1 (the position of log|v| modulo the diagonal).
Eigen::VectorXd multiplier_coordinates(const MultiplierGroup& m, const Eigen::VectorXd& v);

/// Floor of a multiplier coordinate; values within 1e-10 below an integer snap up to it.
std::int64_t snapped_floor(double c);

/// True if every multiplier coordinate lies in the half-open cell [0, 1).
bool in_fundamental_cell(const MultiplierGroup& m, const Eigen::VectorXd& v);

Complex lambda_character(const MultiplierGroup& m, const Eigen::VectorXi& index, const Eigen::VectorXd& y);
Eigen::VectorXcd exponents_from(const MultiplierGroup& m, Complex s, const Eigen::VectorXi& index);

struct Reduction {
    Eigen::VectorXd representative;
    Eigen::VectorXi powers;
};

/// Moves v into the fundamental cell: representative = prod eps_j^{powers_j} (.) v.
Reduction reduce_mod_multipliers(const MultiplierGroup& m, const Eigen::VectorXd& v);

/// Z-lattice inside K given by exact basis elements (an O_K-submodule such as O_K itself).
struct ModuleLattice {
    FieldEmbedding field;
    std::vector<FieldElement> basis;
};

ModuleLattice ring_of_integers_module(const FieldEmbedding& k);
EmbeddedLattice embedded(const ModuleLattice& lattice);

/// Integer matrix of multiplication by x in the lattice basis; inconsistency error if not integral.
IntMatrix multiplication_matrix(const ModuleLattice& lattice, const FieldElement& x);

/// Smith normal form: U * A * V = diag(d), U, V unimodular, d_i | d_{i+1}, d_i >= 0.
struct SmithForm {
    IntMatrix U, V;
    IntVector diagonal;
};
SmithForm smith_normal_form(const IntMatrix& a);

/// Order of L / (u - 1) L.
std::int64_t quotient_size(const ModuleLattice& lattice, const FieldElement& u);

struct QuotientClass {
    FieldElement representative;
    int orbit_size = 0;
};

/// Classes of L / (u - 1) L modulo the action of the multiplier generator eps.
std::vector<QuotientClass> quotient_reps_mod_units(const ModuleLattice& lattice, const FieldElement& u,
                                                   const FieldElement& eps);

/// Cusp data: scaling element, translation lattice and multipliers.
struct CuspFrame {
    GroupElementN scaling;
    EmbeddedLattice lattice;
    MultiplierGroup multipliers;
};

CuspFrame infinity_frame(const FieldEmbedding& k);

struct CuspCoordinates {
    Eigen::VectorXd X;
    double Y0 = 0.0;
    Eigen::VectorXd Y;
};

CuspCoordinates cusp_coordinates(const CuspFrame& frame, const PointN& z);

}  // namespace hmf
