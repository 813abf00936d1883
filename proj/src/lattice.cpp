#include "hmftrace/lattice.hpp"

#include <cmath>
#include <numbers>

#include "hmftrace/error.hpp"

namespace hmf {

Eigen::VectorXd EmbeddedLattice::coordinates(const Eigen::VectorXd& v) const {
    return basis.partialPivLu().solve(v);
}

bool EmbeddedLattice::contains(const Eigen::VectorXd& v, double tol) const {
    const Eigen::VectorXd c = coordinates(v);
    for (Eigen::Index i = 0; i < c.size(); ++i)
        if (std::abs(c[i] - std::round(c[i])) > tol) return false;
    return true;
}

EmbeddedLattice make_lattice(const Eigen::MatrixXd& basis) {
    if (basis.rows() != basis.cols() || basis.rows() == 0)
        fail(ErrorKind::Domain, "lattice basis must be a nonempty square matrix");
    const double det = basis.determinant();
    if (!(std::abs(det) > 1e-300) || !std::isfinite(det)) fail(ErrorKind::Domain, "lattice basis is singular");
    return EmbeddedLattice{basis};
}

EmbeddedLattice ring_of_integers_lattice(const FieldEmbedding& k) {
    return make_lattice(k.basis_matrix);
}

EmbeddedLattice dual_lattice(const EmbeddedLattice& lattice) {
    return make_lattice(lattice.basis.inverse().transpose());
}

double covolume(const EmbeddedLattice& lattice) {
    return std::abs(lattice.basis.determinant());
}

bool zeta_eligible(const EmbeddedLattice& lattice, int bound) {
    const int n = lattice.degree();
    std::vector<int> c(n, -bound);
    const double scale = lattice.basis.cwiseAbs().maxCoeff();
    while (true) {
        bool nonzero = false;
        for (int v : c) nonzero = nonzero || v != 0;
        if (nonzero) {
            Eigen::VectorXd coeff(n);
            for (int i = 0; i < n; ++i) coeff[i] = c[i];
            const Eigen::VectorXd v = lattice.basis * coeff;
            for (int k = 0; k < n; ++k)
                if (std::abs(v[k]) <= 1e-9 * scale) return false;
        }
        int i = 0;
        while (i < n && c[i] == bound) c[i++] = -bound;
        if (i == n) break;
        ++c[i];
    }
    return true;
}

double vector_norm(const Eigen::VectorXd& v) {
    return v.prod();
}

MultiplierGroup make_multiplier_group(const std::vector<Eigen::VectorXd>& generators) {
    if (generators.empty()) fail(ErrorKind::Domain, "multiplier group needs n-1 >= 1 generators");
    const auto n = generators.front().size();
    if (static_cast<Eigen::Index>(generators.size()) != n - 1)
        fail(ErrorKind::Domain, "multiplier group of degree n needs n-1 generators");
    MultiplierGroup m;
    m.generators = generators;
    m.E.resize(n, n);
    m.E.col(0).setOnes();
    for (Eigen::Index j = 0; j + 1 < n; ++j) {
        const auto& g = generators[j];
        if (g.size() != n) fail(ErrorKind::Domain, "generator of wrong length");
        for (Eigen::Index k = 0; k < n; ++k) {
            if (!(g[k] > 0)) fail(ErrorKind::Domain, "multiplier generators must be totally positive");
            m.E(k, j + 1) = std::log(g[k]);
        }
        if (std::abs(m.E.col(j + 1).sum()) > 1e-10) fail(ErrorKind::Domain, "multiplier generator must have norm 1");
    }
    m.det_E = m.E.determinant();
    if (std::abs(m.det_E) < 1e-12) fail(ErrorKind::Domain, "multiplier generators are dependent");
    m.E_inverse = m.E.inverse();
    return m;
}

MultiplierGroup hilbert_multipliers(const FieldEmbedding& k) {
    return make_multiplier_group({fundamental_totally_positive_unit(k)});
}

Eigen::VectorXd multiplier_coordinates(const MultiplierGroup& m, const Eigen::VectorXd& v) {
    const int n = m.degree();
    Eigen::VectorXd logs(n);
    for (int k = 0; k < n; ++k) {
        if (v[k] == 0.0) fail(ErrorKind::Domain, "vector has a zero coordinate");
        logs[k] = std::log(std::abs(v[k]));
    }
    return (m.E_inverse * logs).tail(n - 1);
}

std::int64_t snapped_floor(double c) {
    return static_cast<std::int64_t>(std::floor(c + 1e-10));
}

bool in_fundamental_cell(const MultiplierGroup& m, const Eigen::VectorXd& v) {
    const Eigen::VectorXd c = multiplier_coordinates(m, v);
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if (snapped_floor(c[j]) != 0) return false;
    return true;
}

Complex lambda_character(const MultiplierGroup& m, const Eigen::VectorXi& index, const Eigen::VectorXd& y) {
    for (Eigen::Index k = 0; k < y.size(); ++k)
        if (!(y[k] > 0)) fail(ErrorKind::Domain, "character argument must be totally positive");
    const Eigen::VectorXd c = multiplier_coordinates(m, y);
    double phase = 0.0;
    for (Eigen::Index j = 0; j < c.size(); ++j) phase += index[j] * c[j];
    return std::polar(1.0, 2.0 * std::numbers::pi * phase);
}

Eigen::VectorXcd exponents_from(const MultiplierGroup& m, Complex s, const Eigen::VectorXi& index) {
    const int n = m.degree();
    if (index.size() != n - 1) fail(ErrorKind::Domain, "character index must have n-1 entries");
    Eigen::VectorXcd out(n);
    for (int k = 0; k < n; ++k) {
        double im = 0.0;
        for (int j = 1; j < n; ++j) im += index[j - 1] * m.E_inverse(j, k);
        out[k] = s + Complex(0.0, 2.0 * std::numbers::pi * im);
    }
    return out;
}

Reduction reduce_mod_multipliers(const MultiplierGroup& m, const Eigen::VectorXd& v) {
    const Eigen::VectorXd c = multiplier_coordinates(m, v);
    Reduction r;
    r.powers.resize(c.size());
    r.representative = v;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        const auto p = -snapped_floor(c[j]);
        r.powers[j] = static_cast<int>(p);
        for (Eigen::Index k = 0; k < v.size(); ++k) r.representative[k] *= std::pow(m.generators[j][k], double(p));
    }
    return r;
}

ModuleLattice ring_of_integers_module(const FieldEmbedding& k) {
    return ModuleLattice{k, {FieldElement::from_ints(1, 0), FieldElement::from_ints(0, 1)}};
}

EmbeddedLattice embedded(const ModuleLattice& lattice) {
    const int n = static_cast<int>(lattice.basis.size());
    Eigen::MatrixXd b(n, n);
    for (int j = 0; j < n; ++j) b.col(j) = embed(lattice.field, lattice.basis[j]);
    return make_lattice(b);
}

namespace {

// Rational coordinates of x in the lattice basis.
std::vector<Rational> module_coordinates(const ModuleLattice& lattice, const FieldElement& x) {
    const Rational& a = lattice.basis[0].coeffs[0];
    const Rational& b = lattice.basis[1].coeffs[0];
    const Rational& c = lattice.basis[0].coeffs[1];
    const Rational& d = lattice.basis[1].coeffs[1];
    const Rational det = a * d - b * c;
    if (det == 0) fail(ErrorKind::Domain, "module lattice basis is degenerate");
    return {(d * x.coeffs[0] - b * x.coeffs[1]) / det, (-c * x.coeffs[0] + a * x.coeffs[1]) / det};
}

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

IntMatrix integer_inverse(const IntMatrix& u) {
    const Eigen::MatrixXd inv = u.cast<double>().inverse();
    IntMatrix out = inv.array().round().cast<std::int64_t>().matrix();
    if (!(u * out).isIdentity()) fail(ErrorKind::Inconsistency, "unimodular inverse failed");
    return out;
}

}  // namespace

IntMatrix multiplication_matrix(const ModuleLattice& lattice, const FieldElement& x) {
    const int n = static_cast<int>(lattice.basis.size());
    if (n != 2) fail(ErrorKind::UnsupportedDegree, "module lattices are implemented for n = 2");
    IntMatrix m(n, n);
    for (int j = 0; j < n; ++j) {
        const auto coords = module_coordinates(lattice, mul(lattice.field, x, lattice.basis[j]));
        for (int i = 0; i < n; ++i) {
            if (boost::multiprecision::denominator(coords[i]) != 1)
                fail(ErrorKind::Inconsistency, "lattice is not stable under multiplication by the given element");
            m(i, j) = static_cast<std::int64_t>(coords[i]);
        }
    }
    return m;
}

SmithForm smith_normal_form(const IntMatrix& input) {
    IntMatrix a = input;
    const auto rows = a.rows();
    const auto cols = a.cols();
    IntMatrix u = IntMatrix::Identity(rows, rows);
    IntMatrix v = IntMatrix::Identity(cols, cols);
    const auto steps = std::min(rows, cols);
    for (Eigen::Index t = 0; t < steps; ++t) {
        while (true) {
            // Smallest nonzero entry of the trailing block becomes the pivot.
            Eigen::Index pi = -1, pj = -1;
            std::int64_t best = 0;
            for (Eigen::Index i = t; i < rows; ++i)
                for (Eigen::Index j = t; j < cols; ++j)
                    if (a(i, j) != 0 && (pi < 0 || std::llabs(a(i, j)) < best)) {
                        best = std::llabs(a(i, j));
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            a.row(t).swap(a.row(pi));
            u.row(t).swap(u.row(pi));
            a.col(t).swap(a.col(pj));
            v.col(t).swap(v.col(pj));
            bool clean = true;
            for (Eigen::Index i = t + 1; i < rows; ++i) {
                const std::int64_t q = a(i, t) / a(t, t);
                if (q != 0) {
                    a.row(i) -= q * a.row(t);
                    u.row(i) -= q * u.row(t);
                }
                clean = clean && a(i, t) == 0;
            }
            for (Eigen::Index j = t + 1; j < cols; ++j) {
                const std::int64_t q = a(t, j) / a(t, t);
                if (q != 0) {
                    a.col(j) -= q * a.col(t);
                    v.col(j) -= q * v.col(t);
                }
                clean = clean && a(t, j) == 0;
            }
            if (!clean) continue;
            Eigen::Index bad = -1;
            for (Eigen::Index i = t + 1; i < rows && bad < 0; ++i)
                for (Eigen::Index j = t + 1; j < cols; ++j)
                    if (a(i, j) % a(t, t) != 0) {
                        bad = i;
                        break;
                    }
            if (bad < 0) break;
            a.row(t) += a.row(bad);
            u.row(t) += u.row(bad);
        }
        if (a(t, t) < 0) {
            a.row(t) = -a.row(t);
            u.row(t) = -u.row(t);
        }
    }
    SmithForm out{u, v, IntVector(steps)};
    for (Eigen::Index t = 0; t < steps; ++t) out.diagonal[t] = a(t, t);
    return out;
}

std::int64_t quotient_size(const ModuleLattice& lattice, const FieldElement& u) {
    const FieldElement um1 = sub(u, FieldElement::from_ints(1, 0));
    const Eigen::VectorXd e = embed(lattice.field, um1);
    for (Eigen::Index k = 0; k < e.size(); ++k)
        if (std::abs(e[k]) < 1e-14) fail(ErrorKind::Domain, "u - 1 has a zero coordinate");
    const SmithForm snf = smith_normal_form(multiplication_matrix(lattice, um1));
    std::int64_t size = 1;
    for (Eigen::Index i = 0; i < snf.diagonal.size(); ++i) size *= snf.diagonal[i];
    const double expected = std::abs(static_cast<double>(norm(lattice.field, um1)));
    if (std::abs(static_cast<double>(size) - expected) > 1e-6 * std::max(1.0, expected))
        fail(ErrorKind::Inconsistency, "Smith normal form size disagrees with |N(u-1)|");
    return size;
}

std::vector<QuotientClass> quotient_reps_mod_units(const ModuleLattice& lattice, const FieldElement& u,
                                                   const FieldElement& eps) {
    const std::int64_t size = quotient_size(lattice, u);
    if (size > 10'000'000) fail(ErrorKind::Resource, "quotient too large to enumerate");
    const FieldElement um1 = sub(u, FieldElement::from_ints(1, 0));
    const SmithForm snf = smith_normal_form(multiplication_matrix(lattice, um1));
    const IntMatrix u_inv = integer_inverse(snf.U);
    const IntMatrix action = snf.U * multiplication_matrix(lattice, eps) * u_inv;
    const IntVector& d = snf.diagonal;
    const auto n = d.size();

    auto encode = [&](const IntVector& y) {
        std::int64_t idx = 0;
        for (Eigen::Index i = n - 1; i >= 0; --i) idx = idx * d[i] + y[i];
        return idx;
    };
    auto decode = [&](std::int64_t idx) {
        IntVector y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            y[i] = idx % d[i];
            idx /= d[i];
        }
        return y;
    };
    auto step = [&](const IntVector& y) {
        IntVector z = action * y;
        for (Eigen::Index i = 0; i < n; ++i) z[i] = floor_mod(z[i], d[i]);
        return z;
    };

    std::vector<char> seen(static_cast<std::size_t>(size), 0);
    std::vector<QuotientClass> out;
    for (std::int64_t idx = 0; idx < size; ++idx) {
        if (seen[idx]) continue;
        const IntVector start = decode(idx);
        IntVector y = start;
        int orbit = 0;
        do {
            seen[encode(y)] = 1;
            y = step(y);
            if (++orbit > size) fail(ErrorKind::Inconsistency, "unit orbit on the quotient did not close");
        } while (encode(y) != idx);
        const IntVector x = u_inv * start;
        FieldElement rep = FieldElement::from_ints(0, 0);
        for (Eigen::Index j = 0; j < n; ++j) {
            FieldElement term = lattice.basis[j];
            for (auto& c : term.coeffs) c *= x[j];
            rep = add(rep, term);
        }
        out.push_back({rep, orbit});
    }
    return out;
}

CuspFrame infinity_frame(const FieldEmbedding& k) {
    return CuspFrame{GroupElementN::identity(k.degree), ring_of_integers_lattice(k), hilbert_multipliers(k)};
}

CuspCoordinates cusp_coordinates(const CuspFrame& frame, const PointN& z) {
    for (Eigen::Index k = 0; k < z.size(); ++k)
        if (!(z[k].imag() > 0)) fail(ErrorKind::Domain, "point not in the upper half-space");
    const PointN w = act(frame.scaling.inverse(), z);
    const int n = static_cast<int>(z.size());
    Eigen::VectorXd x(n), y(n);
    for (int k = 0; k < n; ++k) {
        x[k] = w[k].real();
        y[k] = w[k].imag();
    }
    CuspCoordinates out;
    out.X = frame.lattice.coordinates(x);
    out.Y0 = y.prod();
    out.Y = multiplier_coordinates(frame.multipliers, y);
    return out;
}

}  // namespace hmf
