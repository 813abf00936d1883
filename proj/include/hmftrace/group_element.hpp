#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "hmftrace/field.hpp"

namespace hmf {

using Complex = std::complex<double>;
using PointN = Eigen::VectorXcd;

/// Exact SL(2, O_K) entries attached to a GroupElementN.
struct ExactEntries {
    std::shared_ptr<const FieldEmbedding> field;
    std::array<FieldElement, 4> abcd;
};

/// Element of PSL(2, R)^n: coordinate k is the matrix [[a_k, b_k], [c_k, d_k]].
struct GroupElementN {
    Eigen::VectorXd a, b, c, d;
    std::optional<ExactEntries> exact;

    int degree() const { return static_cast<int>(a.size()); }

    static GroupElementN identity(int n);
    /// Same real matrix in every coordinate.
    static GroupElementN diagonal(double a, double b, double c, double d, int n);
    /// From per-coordinate entries; checks det = 1 to 1e-10 and sign-normalizes.
    static GroupElementN from_real(Eigen::VectorXd a, Eigen::VectorXd b, Eigen::VectorXd c, Eigen::VectorXd d);
    /// From exact entries over O_K; checks det = 1 exactly and sign-normalizes.
    static GroupElementN from_field(const FieldEmbedding& k, const FieldElement& a, const FieldElement& b,
                                    const FieldElement& c, const FieldElement& d);
    /// Rotation [[cos t, -sin t], [sin t, cos t]] with angle theta_k in coordinate k.
    static GroupElementN rotation(const Eigen::VectorXd& theta);
    /// diag(N^{1/2}, N^{-1/2}) per coordinate.
    static GroupElementN dilation(const Eigen::VectorXd& norm);

    GroupElementN inverse() const;
    Eigen::VectorXd trace() const { return a + d; }
    bool is_identity(double tol = 1e-12) const;
    /// Flips the sign of all entries so the first nonzero entry of coordinate 1 is positive.
    void normalize_sign();
};

GroupElementN operator*(const GroupElementN& x, const GroupElementN& y);

/// Coordinate-wise Moebius action.
PointN act(const GroupElementN& g, const PointN& z);

/// Hyperbolic point-pair quantity |z - w|^2 / (Im z Im w), coordinate-wise.
Eigen::VectorXd point_pair_u(const PointN& z, const PointN& w);

}  // namespace hmf
