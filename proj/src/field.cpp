#include "hmftrace/field.hpp"

#include <cmath>
#include <regex>
#include <sstream>

#include "hmftrace/error.hpp"

namespace hmf {

namespace {

std::int64_t isqrt(std::int64_t n) {
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

void require_quadratic(const FieldEmbedding& k) {
    if (k.degree != 2) fail(ErrorKind::UnsupportedDegree, "only quadratic fields are supported");
}

}  // namespace

std::string FieldEmbedding::name() const {
    return "Q(sqrt " + std::to_string(radicand) + ")";
}

bool FieldElement::is_zero() const {
    for (const auto& c : coeffs)
        if (c != 0) return false;
    return true;
}

bool FieldElement::is_integral() const {
    for (const auto& c : coeffs)
        if (boost::multiprecision::denominator(c) != 1) return false;
    return true;
}

std::string FieldElement::to_string() const {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? ", " : "") << coeffs[i];
    os << "]";
    return os.str();
}

bool is_squarefree(std::int64_t d) {
    if (d == 0) return false;
    d = d < 0 ? -d : d;
    for (std::int64_t p = 2; p * p <= d; ++p)
        if (d % (p * p) == 0) return false;
    return true;
}

FieldEmbedding make_quadratic_field(std::int64_t d) {
    if (d < 2 || !is_squarefree(d))
        fail(ErrorKind::InvalidField, "radicand must be a squarefree integer >= 2, got " + std::to_string(d));
    FieldEmbedding k;
    k.degree = 2;
    k.radicand = d;
    const double r = std::sqrt(static_cast<double>(d));
    k.basis_matrix.resize(2, 2);
    if (d % 4 == 1) {
        k.discriminant = d;
        k.omega_trace = 1;
        k.omega_norm = (1 - d) / 4;
        k.basis_matrix << 1.0, 0.5 * (1.0 + r), 1.0, 0.5 * (1.0 - r);
    } else {
        k.discriminant = 4 * d;
        k.omega_trace = 0;
        k.omega_norm = -d;
        k.basis_matrix << 1.0, r, 1.0, -r;
    }
    return k;
}

FieldEmbedding parse_field(const std::string& text) {
    static const std::regex pattern(R"(^\s*(?:Q\s*\(\s*sqrt\s*\(?\s*(-?\d+)\s*\)?\s*\)|(-?\d+))\s*$)");
    std::smatch m;
    if (!std::regex_match(text, m, pattern))
        fail(ErrorKind::InvalidField, "cannot parse field descriptor '" + text + "', expected Q(sqrt D)");
    const std::string digits = m[1].matched ? m[1].str() : m[2].str();
    std::int64_t d = 0;
    try {
        d = std::stoll(digits);
    } catch (...) {
        fail(ErrorKind::InvalidField, "radicand out of range in '" + text + "'");
    }
    return make_quadratic_field(d);
}

FieldElement add(const FieldElement& x, const FieldElement& y) {
    FieldElement r = x;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] += y.coeffs[i];
    return r;
}

FieldElement sub(const FieldElement& x, const FieldElement& y) {
    FieldElement r = x;
    for (std::size_t i = 0; i < r.coeffs.size(); ++i) r.coeffs[i] -= y.coeffs[i];
    return r;
}

FieldElement neg(const FieldElement& x) {
    FieldElement r = x;
    for (auto& c : r.coeffs) c = -c;
    return r;
}

FieldElement mul(const FieldEmbedding& k, const FieldElement& x, const FieldElement& y) {
    require_quadratic(k);
    const Rational& a = x.coeffs[0];
    const Rational& b = x.coeffs[1];
    const Rational& c = y.coeffs[0];
    const Rational& d = y.coeffs[1];
    // (a + b w)(c + d w) with w^2 = t w - n.
    const Rational bd = b * d;
    return FieldElement({a * c - bd * k.omega_norm, a * d + b * c + bd * k.omega_trace});
}

FieldElement conjugate(const FieldEmbedding& k, const FieldElement& x) {
    require_quadratic(k);
    return FieldElement({x.coeffs[0] + x.coeffs[1] * k.omega_trace, -x.coeffs[1]});
}

Rational norm(const FieldEmbedding& k, const FieldElement& x) {
    return mul(k, x, conjugate(k, x)).coeffs[0];
}

Rational trace(const FieldEmbedding& k, const FieldElement& x) {
    return add(x, conjugate(k, x)).coeffs[0];
}

FieldElement inverse(const FieldEmbedding& k, const FieldElement& x) {
    const Rational n = norm(k, x);
    if (n == 0) fail(ErrorKind::Domain, "inverse of zero field element");
    FieldElement c = conjugate(k, x);
    for (auto& v : c.coeffs) v /= n;
    return c;
}

FieldElement power(const FieldEmbedding& k, const FieldElement& x, int e) {
    FieldElement base = e < 0 ? inverse(k, x) : x;
    int m = e < 0 ? -e : e;
    FieldElement acc = FieldElement::from_ints(1, 0);
    while (m > 0) {
        if (m & 1) acc = mul(k, acc, base);
        base = mul(k, base, base);
        m >>= 1;
    }
    return acc;
}

Eigen::VectorXd embed(const FieldEmbedding& k, const FieldElement& x) {
    Eigen::VectorXd c(x.coeffs.size());
    for (std::size_t i = 0; i < x.coeffs.size(); ++i) c[i] = static_cast<double>(x.coeffs[i]);
    Eigen::VectorXd e = k.basis_matrix * c;
    if (k.degree == 2) {
        // The smaller conjugate suffers cancellation; recover it from the exact norm.
        const int big = std::abs(e[0]) >= std::abs(e[1]) ? 0 : 1;
        if (e[big] != 0.0) e[1 - big] = static_cast<double>(norm(k, x)) / e[big];
    }
    return e;
}

namespace {

bool rational_sqrt(const Rational& q, Rational* out) {
    if (q < 0) return false;
    const BigInt num = boost::multiprecision::numerator(q);
    const BigInt den = boost::multiprecision::denominator(q);
    const BigInt rn = boost::multiprecision::sqrt(num);
    const BigInt rd = boost::multiprecision::sqrt(den);
    if (rn * rn != num || rd * rd != den) return false;
    *out = Rational(rn, rd);
    return true;
}

}  // namespace

bool sqrt_in_field(const FieldEmbedding& k, const FieldElement& x, FieldElement* root) {
    require_quadratic(k);
    if (x.is_zero()) {
        *root = x;
        return true;
    }
    // Work in the power basis {1, sqrt d}: x = p + q sqrt d.
    // omega = (t + sqrt d)/2 when t = 1, else sqrt d.
    const Rational half_t = k.omega_trace == 1 ? Rational(1, 2) : Rational(0);
    const Rational scale = k.omega_trace == 1 ? Rational(1, 2) : Rational(1);
    const Rational p = x.coeffs[0] + x.coeffs[1] * half_t;
    const Rational q = x.coeffs[1] * scale;
    const Rational d(k.radicand);
    Rational r;
    if (!rational_sqrt(p * p - d * q * q, &r)) return false;
    for (int sign : {1, -1}) {
        Rational u2 = (p + sign * r) / 2;
        Rational u;
        if (!rational_sqrt(u2, &u)) continue;
        Rational v;
        if (u == 0) {
            Rational v2 = p / d;
            if (!rational_sqrt(v2, &v)) continue;
        } else {
            v = q / (2 * u);
        }
        if (u * u + d * v * v != p || 2 * u * v != q) continue;
        // Back to the integral basis; sqrt d = 2 omega - 1 when omega = (1 + sqrt d)/2.
        FieldElement y;
        if (k.omega_trace == 1)
            y = FieldElement({u - v, 2 * v});
        else
            y = FieldElement({u, v});
        *root = y;
        return true;
    }
    return false;
}

FieldElement fundamental_unit(const FieldEmbedding& k) {
    require_quadratic(k);
    // Continued fraction of omega = (P + sqrt D)/Q; convergents p/q give p - q*omega.
    const std::int64_t D = k.radicand;
    const std::int64_t s = isqrt(D);
    std::int64_t P = k.omega_trace == 1 ? 1 : 0;
    std::int64_t Q = k.omega_trace == 1 ? 2 : 1;
    __int128 p_prev = 0, p = 1, q_prev = 1, q = 0;
    for (int iter = 0; iter < 100000; ++iter) {
        const std::int64_t a = floor_div(P + s, Q);
        const __int128 p_next = a * p + p_prev;
        const __int128 q_next = a * q + q_prev;
        p_prev = p;
        p = p_next;
        q_prev = q;
        q = q_next;
        if (p > static_cast<__int128>(INT64_MAX) / 4 || q > static_cast<__int128>(INT64_MAX) / 4)
            fail(ErrorKind::Resource, "fundamental unit exceeds 64-bit coefficient range");
        // N(p - q w) = p^2 - p q t + q^2 n
        const __int128 nrm = p * p - p * q * k.omega_trace + q * q * k.omega_norm;
        if (nrm == 1 || nrm == -1) {
            FieldElement u = FieldElement::from_ints(static_cast<std::int64_t>(p), -static_cast<std::int64_t>(q));
            Eigen::VectorXd e = embed(k, u);
            if (std::abs(e[0]) < 1.0) {
                u = inverse(k, u);
                e = embed(k, u);
            }
            if (e[0] < 0) u = neg(u);
            return u;
        }
        const std::int64_t P_next = a * Q - P;
        const std::int64_t Q_next = (D - P_next * P_next) / Q;
        P = P_next;
        Q = Q_next;
    }
    fail(ErrorKind::Numeric, "continued fraction did not produce a unit");
}

FieldElement fundamental_totally_positive_unit_exact(const FieldEmbedding& k) {
    const FieldElement u = fundamental_unit(k);
    return mul(k, u, u);
}

Eigen::VectorXd fundamental_totally_positive_unit(const FieldEmbedding& k) {
    require_quadratic(k);
    return embed(k, fundamental_totally_positive_unit_exact(k));
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> multiplication_matrix(const FieldEmbedding& k,
                                                                                 const FieldElement& x) {
    require_quadratic(k);
    if (!x.is_integral()) fail(ErrorKind::Domain, "multiplication matrix requires an integral element");
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> m(2, 2);
    for (int j = 0; j < 2; ++j) {
        FieldElement basis = FieldElement::from_ints(j == 0 ? 1 : 0, j == 1 ? 1 : 0);
        FieldElement col = mul(k, x, basis);
        for (int i = 0; i < 2; ++i) m(i, j) = static_cast<std::int64_t>(col.coeffs[i]);
    }
    return m;
}

}  // namespace hmf
