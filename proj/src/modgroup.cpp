#include "hmftrace/modgroup.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <numbers>

#include "hmftrace/error.hpp"
#include "hmftrace/parallel.hpp"
#include "hmftrace/zeta.hpp"

namespace hmf {

namespace {

constexpr double kTraceBand = 1e-9;

// Sign of the k-th embedding of x, computed exactly.
int exact_sign(const FieldEmbedding& field, const FieldElement& x, int k) {
    // x = p + q sqrt(d) in embedding 0; embedding k carries sigma_k sqrt(d).
    const Rational half_t = field.omega_trace == 1 ? Rational(1, 2) : Rational(0);
    const Rational scale = field.omega_trace == 1 ? Rational(1, 2) : Rational(1);
    const Rational p = x.coeffs[0] + x.coeffs[1] * half_t;
    const Rational q = x.coeffs[1] * scale * (field.basis_matrix(k, 1) - static_cast<double>(half_t) > 0 ? 1 : -1);
    const int sp = p > 0 ? 1 : (p < 0 ? -1 : 0);
    const int sq = q > 0 ? 1 : (q < 0 ? -1 : 0);
    if (sq == 0) return sp;
    if (sp == 0 || sp == sq) return sq;
    const Rational diff = p * p - q * q * Rational(field.radicand);
    if (diff == 0) return 0;
    return diff > 0 ? sp : sq;
}

CoordinateKind exact_coordinate_kind(const GroupElementN& g, int k) {
    const auto& e = g.exact->abcd;
    const FieldEmbedding& field = *g.exact->field;
    const FieldElement tr = add(e[0], e[3]);
    const FieldElement two = FieldElement::from_ints(2, 0);
    if (tr == two || tr == neg(two))
        return e[1].is_zero() && e[2].is_zero() ? CoordinateKind::Identity : CoordinateKind::Parabolic;
    const int sign = exact_sign(field, sub(mul(field, tr, tr), FieldElement::from_ints(4, 0)), k);
    return sign > 0 ? CoordinateKind::Hyperbolic : CoordinateKind::Elliptic;
}

void find_fixed_cusp(const GroupElementN& g, ClassificationResult& out) {
    const FieldEmbedding& field = *g.exact->field;
    const auto& e = g.exact->abcd;
    FieldElement lambda;
    if (e[2].is_zero()) {
        // Fixed points infinity (eigenvalue a) and b / (d - a) (eigenvalue d).
        if (std::abs(embed(field, e[0])[0]) > 1.0) {
            out.cusp_p = FieldElement::from_ints(1, 0);
            out.cusp_q = FieldElement::from_ints(0, 0);
            lambda = e[0];
        } else {
            out.cusp_p = e[1];
            out.cusp_q = sub(e[3], e[0]);
            lambda = e[3];
        }
    } else {
        const FieldElement tr = add(e[0], e[3]);
        FieldElement root;
        if (!sqrt_in_field(field, sub(mul(field, tr, tr), FieldElement::from_ints(4, 0)), &root)) return;
        // Fixed points (a - d +- r) / (2c) with eigenvalues (tr +- r) / 2.
        const FieldElement half({Rational(1, 2), Rational(0)});
        FieldElement plus = mul(field, half, add(tr, root));
        const bool use_plus = std::abs(embed(field, plus)[0]) > 1.0;
        const FieldElement r = use_plus ? root : neg(root);
        lambda = mul(field, half, add(tr, r));
        out.cusp_p = add(sub(e[0], e[3]), r);
        out.cusp_q = add(e[2], e[2]);
    }
    out.kind = ElementKind::HyperbolicParabolic;
    out.multiplier = embed(field, lambda).array().square();
}

}  // namespace

const char* element_kind_name(ElementKind kind) noexcept {
    switch (kind) {
        case ElementKind::Identity: return "identity";
        case ElementKind::TotallyElliptic: return "totally-elliptic";
        case ElementKind::TotallyParabolic: return "totally-parabolic";
        case ElementKind::TotallyHyperbolic: return "totally-hyperbolic";
        case ElementKind::HyperbolicParabolic: return "hyperbolic-parabolic";
        case ElementKind::Mixed: return "mixed";
    }
    return "unknown";
}

ClassificationResult classify(const GroupElementN& g) {
    const int n = g.degree();
    ClassificationResult out;
    out.coordinates.resize(n);
    for (int k = 0; k < n; ++k) {
        const double t = g.a[k] + g.d[k];
        const double at = std::abs(t);
        CoordinateKind kind;
        if (std::abs(at - 2.0) <= kTraceBand) {
            if (g.exact) {
                kind = exact_coordinate_kind(g, k);
            } else if (std::abs(g.b[k]) <= 1e-12 && std::abs(g.c[k]) <= 1e-12) {
                kind = CoordinateKind::Identity;
            } else {
                fail(ErrorKind::AmbiguousClassification,
                     "|trace| of coordinate " + std::to_string(k) + " is within 1e-9 of 2 and no exact entries are attached");
            }
        } else {
            kind = at < 2.0 ? CoordinateKind::Elliptic : CoordinateKind::Hyperbolic;
        }
        out.coordinates[k] = kind;
        if (kind == CoordinateKind::Elliptic) {
            // Conjugate to R(theta) = [[cos, sin], [-sin, cos]] with theta in (0, pi), which has c < 0.
            const double tt = g.c[k] < 0 ? t : -t;
            out.angles.push_back(std::acos(std::clamp(0.5 * tt, -1.0, 1.0)));
        } else if (kind == CoordinateKind::Hyperbolic) {
            const double root_n = 0.5 * (at + std::sqrt(std::max(at * at - 4.0, 0.0)));
            out.norms.push_back(root_n * root_n);
        }
    }
    auto count = [&](CoordinateKind c) { return std::count(out.coordinates.begin(), out.coordinates.end(), c); };
    const auto ids = count(CoordinateKind::Identity), par = count(CoordinateKind::Parabolic);
    const auto ell = count(CoordinateKind::Elliptic), hyp = count(CoordinateKind::Hyperbolic);
    if (ids == n) {
        out.kind = ElementKind::Identity;
    } else if (ids > 0) {
        fail(ErrorKind::Domain, "element is trivial in some but not all coordinates");
    } else if (par > 0) {
        if (par != n) fail(ErrorKind::Domain, "parabolic coordinates mixed with other types");
        out.kind = ElementKind::TotallyParabolic;
    } else if (ell == n) {
        out.kind = ElementKind::TotallyElliptic;
    } else if (hyp == n) {
        out.kind = ElementKind::TotallyHyperbolic;
        if (g.exact) find_fixed_cusp(g, out);
    } else {
        out.kind = ElementKind::Mixed;
    }
    return out;
}

double kernel_k(const TestFunction& psi, const PointN& z, const PointN& w) {
    return psi(point_pair_u(z, w));
}

double automorphic_kernel_partial(const TestFunction& psi, const std::vector<GroupElementN>& elements, const PointN& z,
                                  const PointN& w) {
    std::vector<double> terms(elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i) terms[i] = kernel_k(psi, z, act(elements[i], w));
    return pairwise_sum(terms);
}

namespace {

struct IntElement {
    std::int64_t x0, x1;
    bool operator<(const IntElement& o) const { return x0 != o.x0 ? x0 < o.x0 : x1 < o.x1; }
    bool operator==(const IntElement& o) const { return x0 == o.x0 && x1 == o.x1; }
    bool is_zero() const { return x0 == 0 && x1 == 0; }
};

IntElement imul(const FieldEmbedding& k, IntElement x, IntElement y) {
    return {x.x0 * y.x0 - k.omega_norm * x.x1 * y.x1, x.x0 * y.x1 + x.x1 * y.x0 + k.omega_trace * x.x1 * y.x1};
}

double embedding(const FieldEmbedding& k, IntElement x, int j) {
    return static_cast<double>(x.x0) + static_cast<double>(x.x1) * k.basis_matrix(j, 1);
}

// Elements with |x^(j)| <= bound in both embeddings.
std::vector<IntElement> bounded_integers(const FieldEmbedding& k, double bound) {
    const Eigen::Matrix2d inv = k.basis_matrix.inverse();
    std::int64_t range[2];
    for (int j = 0; j < 2; ++j) range[j] = static_cast<std::int64_t>(std::ceil(bound * inv.row(j).cwiseAbs().sum()));
    std::vector<IntElement> out;
    for (std::int64_t x0 = -range[0]; x0 <= range[0]; ++x0)
        for (std::int64_t x1 = -range[1]; x1 <= range[1]; ++x1) {
            const IntElement x{x0, x1};
            if (std::abs(embedding(k, x, 0)) <= bound + 1e-12 && std::abs(embedding(k, x, 1)) <= bound + 1e-12)
                out.push_back(x);
        }
    return out;
}

FieldElement to_field(IntElement x) { return FieldElement::from_ints(x.x0, x.x1); }

}  // namespace

std::vector<GroupElementN> enumerate_group_elements(const FieldEmbedding& k, double height_bound,
                                                    const EnumerationOptions& opt) {
    if (k.degree != 2) fail(ErrorKind::UnsupportedDegree, "enumeration is implemented for quadratic fields");
    if (!(height_bound >= 0)) fail(ErrorKind::Domain, "height bound must be nonnegative");
    const auto elems = bounded_integers(k, height_bound);
    const double pairs = static_cast<double>(elems.size()) * static_cast<double>(elems.size());
    if (pairs > 50.0 * static_cast<double>(opt.max_elements))
        fail(ErrorKind::Resource, "height bound " + std::to_string(height_bound) + " exceeds the element cap");
    std::map<IntElement, std::vector<std::pair<std::size_t, std::size_t>>> products;
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = 0; j < elems.size(); ++j) products[imul(k, elems[i], elems[j])].emplace_back(i, j);
    std::vector<GroupElementN> out;
    for (const auto& a : elems)
        for (const auto& d : elems) {
            IntElement target = imul(k, a, d);
            target.x0 -= 1;
            const auto it = products.find(target);
            if (it == products.end()) continue;
            for (const auto& [ib, ic] : it->second) {
                const IntElement entries[4] = {a, elems[ib], elems[ic], d};
                // One representative of {g, -g}: the first nonzero entry is positive in the first embedding.
                double lead = 0.0;
                for (const auto& e : entries)
                    if (!e.is_zero()) {
                        lead = embedding(k, e, 0);
                        break;
                    }
                if (lead < 0) continue;
                if (out.size() >= opt.max_elements)
                    fail(ErrorKind::Resource, "more than " + std::to_string(opt.max_elements) + " elements below height " +
                                                  std::to_string(height_bound));
                out.push_back(GroupElementN::from_field(k, to_field(a), to_field(elems[ib]), to_field(elems[ic]),
                                                        to_field(d)));
            }
        }
    return out;
}

namespace {

std::int64_t minors_gcd(const FieldEmbedding& k, const CosetPair& p) {
    // Columns: c, c omega, d, d omega in the integral basis.
    const std::int64_t cols[4][2] = {{p.c[0], p.c[1]},
                                     {-k.omega_norm * p.c[1], p.c[0] + k.omega_trace * p.c[1]},
                                     {p.d[0], p.d[1]},
                                     {-k.omega_norm * p.d[1], p.d[0] + k.omega_trace * p.d[1]}};
    std::int64_t g = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) g = std::gcd(g, cols[i][0] * cols[j][1] - cols[i][1] * cols[j][0]);
    return g;
}

// Q_k = |c_k z_k + d_k|^2 / y_k.
Eigen::VectorXd pair_weights(const FieldEmbedding& k, const PointN& z, const CosetPair& p) {
    Eigen::VectorXd q(2);
    for (int j = 0; j < 2; ++j) {
        const double ck = p.c[0] + p.c[1] * k.basis_matrix(j, 1);
        const double dk = p.d[0] + p.d[1] * k.basis_matrix(j, 1);
        const double x = z[j].real(), y = z[j].imag();
        q[j] = ((ck * x + dk) * (ck * x + dk) + ck * ck * y * y) / y;
    }
    return q;
}

void require_upper(const PointN& z) {
    if (z.size() != 2) fail(ErrorKind::Domain, "Eisenstein series are implemented for n = 2");
    for (Eigen::Index j = 0; j < z.size(); ++j)
        if (!(z[j].imag() > 0)) fail(ErrorKind::Domain, "point not in the upper half-space");
}

}  // namespace

std::vector<CosetPair> eisenstein_pairs(const FieldEmbedding& k, const PointN& z, double bound) {
    if (k.degree != 2) fail(ErrorKind::UnsupportedDegree, "Eisenstein series are implemented for quadratic fields");
    require_upper(z);
    if (!(bound > 0)) fail(ErrorKind::Domain, "norm bound must be positive");
    const MultiplierGroup M = hilbert_multipliers(k);
    // In the unit cell log Q_k <= log(bound)/n + sum_j max(0, log eps_j^(k)); enumerate sum_k Q_k / B_k <= n.
    Eigen::Vector2d B;
    for (int j = 0; j < 2; ++j) {
        double lb = std::log(bound) / 2.0;
        for (const auto& eps : M.generators) lb += std::max(0.0, std::log(eps[j]));
        B[j] = std::exp(lb) * (1.0 + 1e-9);
    }
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(4, 4);
    for (int j = 0; j < 2; ++j) {
        const double w = k.basis_matrix(j, 1);
        const double x = z[j].real(), y = z[j].imag();
        const double s1 = 1.0 / std::sqrt(y * B[j]), s2 = std::sqrt(y / B[j]);
        // Integer coordinates (c0, c1, d0, d1).
        basis.row(2 * j) << x * s1, x * w * s1, s1, w * s1;
        basis.row(2 * j + 1) << s2, w * s2, 0.0, 0.0;
    }
    std::vector<CosetPair> out;
    for_each_short_vector(EmbeddedLattice{basis}, Eigen::VectorXd::Ones(4), 2.0,
                          [&](const Eigen::VectorXi& v, const Eigen::VectorXd&) {
                              if (v[0] == 0 && v[1] == 0) return;
                              for (int i = 0; i < 4; ++i) {
                                  if (v[i] < 0) return;
                                  if (v[i] > 0) break;
                              }
                              const CosetPair p{{v[0], v[1]}, {v[2], v[3]}};
                              const Eigen::VectorXd q = pair_weights(k, z, p);
                              if (q.prod() > bound) return;
                              const Eigen::VectorXd c = multiplier_coordinates(M, q);
                              for (Eigen::Index i = 0; i < c.size(); ++i)
                                  if (snapped_floor(c[i]) != 0) return;
                              if (minors_gcd(k, p) != 1) return;
                              out.push_back(p);
                          });
    return out;
}

Complex eisenstein_partial(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m, const PointN& z,
                           const std::vector<CosetPair>& pairs) {
    require_upper(z);
    const Eigen::VectorXcd sk = exponents_from(hilbert_multipliers(k), s, m);
    Eigen::Vector2d logy;
    for (int j = 0; j < 2; ++j) logy[j] = std::log(z[j].imag());
    std::vector<Complex> terms(pairs.size() + 1);
    terms[0] = std::exp(sk[0] * logy[0] + sk[1] * logy[1]);
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Eigen::VectorXd q = pair_weights(k, z, pairs[i]);
        // y_k / |c_k z_k + d_k|^2 = 1 / Q_k.
        terms[i + 1] = std::exp(-sk[0] * std::log(q[0]) - sk[1] * std::log(q[1]));
    }
    return pairwise_sum(terms);
}

EisensteinValue eisenstein_direct(const FieldEmbedding& k, Complex s, const Eigen::VectorXi& m, const PointN& z,
                                  double bound) {
    if (!(s.real() > 1.0)) fail(ErrorKind::Domain, "the Eisenstein series converges only for Re s > 1");
    const auto pairs = eisenstein_pairs(k, z, bound);
    EisensteinValue out;
    out.value = eisenstein_partial(k, s, m, z, pairs);
    out.terms = pairs.size() + 1;
    std::size_t upper = 0;
    for (const auto& p : pairs)
        if (pair_weights(k, z, p).prod() > 0.5 * bound) ++upper;
    const double kappa = static_cast<double>(upper) / (0.5 * bound);
    const double sigma = s.real();
    out.tail_estimate = kappa * std::pow(bound, 1.0 - sigma) / (sigma - 1.0);
    return out;
}

}  // namespace hmf
