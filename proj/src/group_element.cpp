#include "hmftrace/group_element.hpp"

#include <cmath>

#include "hmftrace/error.hpp"

namespace hmf {

GroupElementN GroupElementN::identity(int n) {
    return diagonal(1.0, 0.0, 0.0, 1.0, n);
}

GroupElementN GroupElementN::diagonal(double a, double b, double c, double d, int n) {
    return from_real(Eigen::VectorXd::Constant(n, a), Eigen::VectorXd::Constant(n, b),
                     Eigen::VectorXd::Constant(n, c), Eigen::VectorXd::Constant(n, d));
}

GroupElementN GroupElementN::from_real(Eigen::VectorXd a, Eigen::VectorXd b, Eigen::VectorXd c,
                                       Eigen::VectorXd d) {
    const auto n = a.size();
    if (b.size() != n || c.size() != n || d.size() != n || n == 0)
        fail(ErrorKind::Domain, "group element entries must have equal positive length");
    for (Eigen::Index k = 0; k < n; ++k) {
        const double det = a[k] * d[k] - b[k] * c[k];
        if (std::abs(det - 1.0) > 1e-10)
            fail(ErrorKind::Domain, "group element coordinate " + std::to_string(k) + " has determinant " +
                                        std::to_string(det));
    }
    GroupElementN g{std::move(a), std::move(b), std::move(c), std::move(d), std::nullopt};
    g.normalize_sign();
    return g;
}

GroupElementN GroupElementN::from_field(const FieldEmbedding& k, const FieldElement& a, const FieldElement& b,
                                        const FieldElement& c, const FieldElement& d) {
    const FieldElement det = sub(mul(k, a, d), mul(k, b, c));
    if (!(det == FieldElement::from_ints(1, 0)))
        fail(ErrorKind::Domain, "matrix over O_K does not have determinant 1");
    GroupElementN g;
    g.a = embed(k, a);
    g.b = embed(k, b);
    g.c = embed(k, c);
    g.d = embed(k, d);
    g.exact = ExactEntries{std::make_shared<const FieldEmbedding>(k), {a, b, c, d}};
    g.normalize_sign();
    return g;
}

GroupElementN GroupElementN::rotation(const Eigen::VectorXd& theta) {
    const auto n = theta.size();
    Eigen::VectorXd a(n), b(n), c(n), d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        a[k] = std::cos(theta[k]);
        b[k] = -std::sin(theta[k]);
        c[k] = std::sin(theta[k]);
        d[k] = std::cos(theta[k]);
    }
    GroupElementN g{a, b, c, d, std::nullopt};
    g.normalize_sign();
    return g;
}

GroupElementN GroupElementN::dilation(const Eigen::VectorXd& norm) {
    const auto n = norm.size();
    Eigen::VectorXd a(n), d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        if (!(norm[k] > 0)) fail(ErrorKind::Domain, "dilation requires positive norms");
        a[k] = std::sqrt(norm[k]);
        d[k] = 1.0 / a[k];
    }
    return GroupElementN{a, Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), d, std::nullopt};
}

void GroupElementN::normalize_sign() {
    double lead = 0.0;
    if (exact) {
        for (const auto& e : exact->abcd) {
            if (!e.is_zero()) {
                lead = embed(*exact->field, e)[0];
                break;
            }
        }
    } else {
        for (double v : {a[0], b[0], c[0], d[0]}) {
            if (v != 0.0) {
                lead = v;
                break;
            }
        }
    }
    if (lead < 0) {
        a = -a;
        b = -b;
        c = -c;
        d = -d;
        if (exact)
            for (auto& e : exact->abcd) e = neg(e);
    }
}

GroupElementN GroupElementN::inverse() const {
    GroupElementN g{d, -b, -c, a, std::nullopt};
    if (exact) {
        const auto& e = exact->abcd;
        g.exact = ExactEntries{exact->field, {e[3], neg(e[1]), neg(e[2]), e[0]}};
    }
    g.normalize_sign();
    return g;
}

bool GroupElementN::is_identity(double tol) const {
    if (exact) {
        const auto& e = exact->abcd;
        const FieldElement one = FieldElement::from_ints(1, 0);
        return e[1].is_zero() && e[2].is_zero() && e[0] == e[3] && (e[0] == one || e[0] == neg(one));
    }
    for (int k = 0; k < degree(); ++k) {
        if (std::abs(b[k]) > tol || std::abs(c[k]) > tol || std::abs(std::abs(a[k]) - 1.0) > tol ||
            std::abs(a[k] - d[k]) > tol)
            return false;
    }
    // All coordinates must carry the same sign (an element of PSL(2,R)^n, not of the product of PSL's).
    for (int k = 1; k < degree(); ++k)
        if ((a[k] > 0) != (a[0] > 0)) return false;
    return true;
}

GroupElementN operator*(const GroupElementN& x, const GroupElementN& y) {
    GroupElementN g;
    g.a = x.a.cwiseProduct(y.a) + x.b.cwiseProduct(y.c);
    g.b = x.a.cwiseProduct(y.b) + x.b.cwiseProduct(y.d);
    g.c = x.c.cwiseProduct(y.a) + x.d.cwiseProduct(y.c);
    g.d = x.c.cwiseProduct(y.b) + x.d.cwiseProduct(y.d);
    if (x.exact && y.exact) {
        const FieldEmbedding& k = *x.exact->field;
        const auto& p = x.exact->abcd;
        const auto& q = y.exact->abcd;
        g.exact = ExactEntries{x.exact->field,
                               {add(mul(k, p[0], q[0]), mul(k, p[1], q[2])), add(mul(k, p[0], q[1]), mul(k, p[1], q[3])),
                                add(mul(k, p[2], q[0]), mul(k, p[3], q[2])), add(mul(k, p[2], q[1]), mul(k, p[3], q[3]))}};
        g.a = embed(k, g.exact->abcd[0]);
        g.b = embed(k, g.exact->abcd[1]);
        g.c = embed(k, g.exact->abcd[2]);
        g.d = embed(k, g.exact->abcd[3]);
    }
    g.normalize_sign();
    return g;
}

PointN act(const GroupElementN& g, const PointN& z) {
    if (z.size() != g.degree()) fail(ErrorKind::Domain, "point and group element have different degree");
    PointN w(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) {
        if (!(z[k].imag() > 0)) fail(ErrorKind::Domain, "point not in the upper half-space");
        const Complex num = g.a[k] * z[k] + g.b[k];
        const Complex den = g.c[k] * z[k] + g.d[k];
        // Imaginary part via y / |cz + d|^2 keeps it positive under round-off.
        const double y = z[k].imag() / std::norm(den);
        const Complex q = num / den;
        w[k] = Complex(q.real(), y);
    }
    return w;
}

Eigen::VectorXd point_pair_u(const PointN& z, const PointN& w) {
    Eigen::VectorXd u(z.size());
    for (Eigen::Index k = 0; k < z.size(); ++k) u[k] = std::norm(z[k] - w[k]) / (z[k].imag() * w[k].imag());
    return u;
}

}  // namespace hmf
