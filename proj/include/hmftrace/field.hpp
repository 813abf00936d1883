#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>

namespace hmf {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// A real quadratic field with integral basis {1, omega}, omega = sqrt(d) or (1+sqrt(d))/2.
/// Rows of basis_matrix are the real embeddings, columns the basis elements.
struct FieldEmbedding {
    int degree = 2;
    std::int64_t radicand = 0;
    std::int64_t discriminant = 0;
    Eigen::MatrixXd basis_matrix;
    /// omega^2 = omega_trace * omega - omega_norm.
    std::int64_t omega_trace = 0;
    std::int64_t omega_norm = 0;

    std::string name() const;
};

/// Element of K in coordinates of the integral basis.
struct FieldElement {
    std::vector<Rational> coeffs;

    FieldElement() = default;
    explicit FieldElement(std::vector<Rational> c) : coeffs(std::move(c)) {}
    static FieldElement from_ints(std::int64_t a, std::int64_t b) { return FieldElement({Rational(a), Rational(b)}); }

    bool is_zero() const;
    bool is_integral() const;
    bool operator==(const FieldElement& o) const { return coeffs == o.coeffs; }
    std::string to_string() const;
};

FieldEmbedding make_quadratic_field(std::int64_t d);

/// Parses "Q(sqrt D)", "Q(sqrt(D))" or a bare integer D.
FieldEmbedding parse_field(const std::string& text);

bool is_squarefree(std::int64_t d);

FieldElement add(const FieldElement& x, const FieldElement& y);
FieldElement sub(const FieldElement& x, const FieldElement& y);
FieldElement neg(const FieldElement& x);
FieldElement mul(const FieldEmbedding& k, const FieldElement& x, const FieldElement& y);
FieldElement conjugate(const FieldEmbedding& k, const FieldElement& x);
FieldElement inverse(const FieldEmbedding& k, const FieldElement& x);
FieldElement power(const FieldEmbedding& k, const FieldElement& x, int e);
Rational norm(const FieldEmbedding& k, const FieldElement& x);
Rational trace(const FieldEmbedding& k, const FieldElement& x);

/// basis_matrix * coeffs.
Eigen::VectorXd embed(const FieldEmbedding& k, const FieldElement& x);

/// Exact square root in K if x is a square, otherwise false.
bool sqrt_in_field(const FieldEmbedding& k, const FieldElement& x, FieldElement* root);

/// Fundamental unit with first embedding > 1.
FieldElement fundamental_unit(const FieldEmbedding& k);

/// Square of the fundamental unit: generator of the squares of units.
FieldElement fundamental_totally_positive_unit_exact(const FieldEmbedding& k);

/// Embeddings (eps1, eps2) of the generator above, eps1 > 1 > eps2 > 0.
Eigen::VectorXd fundamental_totally_positive_unit(const FieldEmbedding& k);

/// Integer matrix of multiplication by x in the integral basis (x must be integral).
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> multiplication_matrix(const FieldEmbedding& k,
                                                                                 const FieldElement& x);

}  // namespace hmf
