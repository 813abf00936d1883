#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hmftrace/error.hpp"
#include "hmftrace/field.hpp"
#include "hmftrace/specfun.hpp"
#include "hmftrace/zeta.hpp"

using namespace hmf;
using std::numbers::pi;

namespace {

// Kronecker symbol (D / n) for a fundamental discriminant D and n >= 1.
int kronecker(long D, long n) {
    int result = 1;
    while (n % 2 == 0) {
        n /= 2;
        const long r = ((D % 8) + 8) % 8;
        if (r == 0 || r == 4 || r == 2 || r == 6) return 0;
        if (r == 3 || r == 5) result = -result;
    }
    long a = ((D % n) + n) % n;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            if (n % 8 == 3 || n % 8 == 5) result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3) result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

// zeta_K(s) = zeta(s) L(s, chi_D) for real s > 1; counts ideals of each norm through 1 * chi_D.
double dedekind_zeta(long D, double s) {
    double zeta = 0.0, l = 0.0;
    const long periods = 20000;
    for (long n = periods * std::abs(D); n >= 1; --n) {
        const double t = std::pow(double(n), -s);
        zeta += t;
        l += kronecker(D, n) * t;
    }
    const double N = double(periods * std::abs(D));
    zeta += std::pow(N, 1 - s) / (s - 1) - 0.5 * std::pow(N, -s);
    return zeta * l;
}

double jacobi_theta(double x) {
    double sum = 1.0;
    for (int n = 1; n < 50; ++n) sum += 2.0 * std::exp(-pi * x * n * n);
    return sum;
}

// Sum over orbit representatives with |Nl| <= B plus the main-term tail rho B^{1-s} / (s-1).
double sharp_cutoff_sum(const ZetaContext& ctx, double s, double B) {
    Eigen::VectorXd w(2);
    const double e = ctx.multipliers.generators[0].maxCoeff();
    w << 1.0 / (B * e * e), 1.0 / (B * e * e);
    double sum = 0.0;
    for_each_short_vector(ctx.lattice, w, 2.0, [&](const Eigen::VectorXi&, const Eigen::VectorXd& v) {
        const double N = std::abs(v[0] * v[1]);
        if (N <= B && in_fundamental_cell(ctx.multipliers, v.cwiseAbs())) sum += std::pow(N, -s);
    });
    return sum + residue_at_one(ctx) * std::pow(B, 1 - s) / (s - 1);
}

const ZetaContext& sqrt2() {
    static const ZetaContext ctx = hilbert_zeta_context(make_quadratic_field(2));
    return ctx;
}

const ZetaContext& sqrt5() {
    static const ZetaContext ctx = hilbert_zeta_context(make_quadratic_field(5));
    return ctx;
}

Eigen::VectorXd vec(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST(Theta, SquareLatticeAtOne) {
    const EmbeddedLattice z2 = make_lattice(Eigen::MatrixXd::Identity(2, 2));
    EXPECT_NEAR(theta(z2, vec(1.0, 1.0)), 1.18034060, 1e-8);
    EXPECT_NEAR(theta(z2, vec(0.7, 2.3)), jacobi_theta(0.7) * jacobi_theta(2.3), 1e-14);
    EXPECT_THROW(theta(z2, vec(0.0, 1.0)), Error);
}

TEST(Theta, PoissonSummation) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    for (const auto* ctx : {&sqrt2(), &sqrt5()}) {
        const EmbeddedLattice& L = ctx->lattice;
        const EmbeddedLattice D = dual_lattice(L);
        const double vol = covolume(L);
        for (int i = 0; i < 8; ++i) {
            const Eigen::VectorXd x = vec(std::exp(d(rng)), std::exp(d(rng)));
            const double lhs = theta(L, x);
            const double rhs = theta(D, x.cwiseInverse()) / (vol * std::sqrt(x.prod()));
            EXPECT_LE(std::abs(lhs - rhs), 1e-12 * lhs) << x.transpose();
        }
    }
}

TEST(Theta, ComplexArgumentMatchesReal) {
    const auto& L = sqrt2().lattice;
    const Eigen::VectorXd x = vec(0.8, 1.3);
    EXPECT_NEAR(theta_minus_one(L, x.cast<Complex>()).real(), theta(L, x) - 1.0, 1e-15);
    Eigen::VectorXcd z(2);
    z << Complex(0.8, 0.3), Complex(1.3, -0.2);
    const Complex t = theta_minus_one(L, z);
    EXPECT_NEAR(std::abs(theta_minus_one(L, z.conjugate()) - std::conj(t)), 0.0, 1e-15);
}

TEST(ZetaContext, Validation) {
    const auto k = make_quadratic_field(2);
    EXPECT_THROW(ZetaContext::make(make_lattice(Eigen::MatrixXd::Identity(2, 2)), hilbert_multipliers(k),
                                   Eigen::VectorXi::Zero(1)),
                 Error);
    EXPECT_THROW(hilbert_zeta_context(k, Eigen::VectorXi::Zero(2)), Error);
    const ZetaContext d = sqrt2().dual();
    EXPECT_NEAR(covolume(d.lattice) * covolume(sqrt2().lattice), 1.0, 1e-14);
}

TEST(ZetaDirect, DedekindOracle) {
    const double oracle = 4.0 * dedekind_zeta(8, 2.0);
    EXPECT_NEAR(oracle, 5.7398, 1e-4);
    const ZetaValue z = zeta_direct(sqrt2(), 2.0);
    EXPECT_LE(std::abs(z.value - oracle), 1e-6 * oracle);
    EXPECT_LE(std::abs(z.value.imag()), 1e-14);
    const double oracle5 = 4.0 * dedekind_zeta(5, 3.0);
    EXPECT_LE(std::abs(zeta_direct(sqrt5(), 3.0).value - oracle5), 1e-6 * oracle5);
}

TEST(ZetaDirect, SmoothCutoffAgreesWithSharpCutoff) {
    for (const auto* ctx : {&sqrt2(), &sqrt5()}) {
        const double sharp = sharp_cutoff_sum(*ctx, 3.0, 4e4);
        const ZetaValue z = zeta_direct(*ctx, 3.0);
        EXPECT_LE(std::abs(z.value - sharp), 1e-8 * sharp);
        EXPECT_LE(z.error_estimate, 1e-10 * sharp);
    }
}

TEST(ZetaDirect, StableInCutoff) {
    DirectOptions small;
    small.base_norm = 1024.0;
    for (Complex s : {Complex(1.5, 0.0), Complex(2.0, 7.0), Complex(1.2, -3.0), Complex(1.5, 20.0)}) {
        const Complex a = zeta_direct(sqrt2(), s).value;
        const Complex b = zeta_direct(sqrt2(), s, small).value;
        EXPECT_LE(std::abs(a - b), 1e-10 * std::abs(a)) << s;
    }
    EXPECT_THROW(zeta_direct(sqrt2(), Complex(1.0, 2.0)), Error);
}

TEST(ZetaContinued, MatchesDirect) {
    for (const auto* base : {&sqrt2(), &sqrt5()})
        for (int m : {0, 2, -4})
            for (Complex s : {Complex(1.5, 0.0), Complex(2.0, 4.0), Complex(3.0, -9.0)}) {
                const ZetaContext ctx = base->with_character(Eigen::VectorXi::Constant(1, m));
                const Complex d = zeta_direct(ctx, s).value;
                const Complex c = zeta_continued(ctx, s).value;
                EXPECT_LE(std::abs(c - d), 1e-8 * std::abs(d)) << "m=" << m << " s=" << s;
            }
}

TEST(ZetaContinued, OddCharacterVanishesWithNormMinusOneUnit) {
    // The unit of norm -1 maps each orbit to one of equal norm with the character value negated.
    for (const auto* base : {&sqrt2(), &sqrt5()})
        for (int m : {1, -3}) {
            const ZetaContext ctx = base->with_character(Eigen::VectorXi::Constant(1, m));
            const ZetaContext even = base->with_character(Eigen::VectorXi::Constant(1, 2));
            const double scale = std::abs(zeta_direct(even, 2.0).value);
            EXPECT_LE(std::abs(zeta_direct(ctx, Complex(2.0, 1.0)).value), 1e-12 * scale);
            EXPECT_LE(std::abs(zeta_continued(ctx, Complex(0.5, 3.0)).value), 1e-9 * scale);
        }
}

TEST(ZetaContinued, OddCharacterOnOrders) {
    // Z[2 sqrt 2] and Z[4 sqrt 5] have no unit of norm -1, so odd characters survive.
    const ZetaContext a = order_zeta_context(make_quadratic_field(2), 2, 1);
    const ZetaContext b = order_zeta_context(make_quadratic_field(5), 8, -1);
    EXPECT_NEAR(a.multipliers.generators[0][0], 3 + 2 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(b.multipliers.generators[0][0], 9 + 4 * std::sqrt(5.0), 1e-11);
    for (const auto* ctx : {&a, &b}) {
        const Complex d = zeta_direct(*ctx, 2.0).value;
        EXPECT_GT(std::abs(d), 1.0);
        EXPECT_LE(std::abs(zeta_continued(*ctx, 2.0).value - d), 1e-8 * std::abs(d));
        for (Complex s : {Complex(0.5, 0.0), Complex(0.3, 2.0), Complex(0.25, 15.0)})
            EXPECT_LE(functional_equation_residual(*ctx, s), 1e-8) << s;
    }
}

TEST(ZetaContinued, ConjugationSymmetry) {
    const ZetaContext plus = sqrt2().with_character(Eigen::VectorXi::Constant(1, 2));
    const ZetaContext minus = sqrt2().with_character(Eigen::VectorXi::Constant(1, -2));
    for (Complex s : {Complex(2.5, 1.5), Complex(0.4, -6.0)}) {
        const Complex z = zeta_continued(plus, s).value;
        EXPECT_LE(std::abs(zeta_continued(minus, std::conj(s)).value - std::conj(z)), 1e-10 * std::abs(z));
    }
    const Complex d = zeta_direct(plus, Complex(1.7, 2.0)).value;
    EXPECT_LE(std::abs(zeta_direct(minus, Complex(1.7, -2.0)).value - std::conj(d)), 1e-10 * std::abs(d));
    const Complex half = zeta_continued(sqrt2(), 0.5).value;
    EXPECT_LE(std::abs(half.imag()), 1e-10 * std::abs(half));
    const double three = zeta_direct(sqrt2(), 3.0).value.real();
    EXPECT_GT(three, 0.0);
}

TEST(ZetaContinued, ResidueScaling) {
    const ZetaContext doubled = ZetaContext::make(make_lattice(2.0 * sqrt2().lattice.basis), sqrt2().multipliers,
                                                  Eigen::VectorXi::Zero(1));
    EXPECT_NEAR(residue_at_one(doubled), 0.25 * residue_at_one(sqrt2()), 1e-14);
}

TEST(ZetaContinued, IndependentOfSplitAndContour) {
    const ZetaContext ctx = sqrt2().with_character(Eigen::VectorXi::Constant(1, 2));
    const Complex s(0.3, 6.0);
    const Complex ref = completed_xi(ctx, s).value;
    ContinuationOptions a, b, c;
    a.split = 0.5;
    b.split = 3.0;
    b.rotation = 0.3;
    c.periodic_nodes = 96;
    c.rotation = 0.0;
    for (const auto& opt : {a, b, c})
        EXPECT_LE(std::abs(completed_xi(ctx, s, opt).value - ref), 1e-10 * std::abs(ref));
}

TEST(ZetaContinued, FunctionalEquation) {
    for (const auto* base : {&sqrt2(), &sqrt5()})
        for (int m : {0, 2})
            for (Complex s : {Complex(0.5, 3.0), Complex(-0.7, 1.1), Complex(0.25, 21.0), Complex(2.0, 0.5)}) {
                const ZetaContext ctx = base->with_character(Eigen::VectorXi::Constant(1, m));
                const double r = functional_equation_residual(ctx, s);
                EXPECT_LE(r, 1e-8) << "m=" << m << " s=" << s;
                EXPECT_NEAR(functional_equation_residual(ctx, 1.0 - std::conj(s)), r, 1e-10);
            }
}

TEST(ZetaContinued, AsymmetricForm) {
    // Z_L(s) = vol(L*) 2^{ns} pi^{n(s-1)} prod Gamma(1 - s_k) sin(pi s_k / 2) Z_{L*}(1 - s, -m).
    const ZetaContext ctx = sqrt5().with_character(Eigen::VectorXi::Constant(1, 2));
    const Complex s(-0.4, 2.5);
    const Eigen::VectorXcd sk = exponents_from(ctx.multipliers, s, ctx.m);
    Complex factor = std::pow(2.0, 2.0 * s) * std::pow(pi, 2.0 * (s - 1.0)) / covolume(ctx.lattice);
    for (int k = 0; k < 2; ++k) factor *= complex_gamma(1.0 - sk[k]) * std::sin(0.5 * pi * sk[k]);
    const Complex lhs = zeta_continued(ctx, s).value;
    const Complex rhs = factor * zeta_continued(ctx.dual(), 1.0 - s).value;
    EXPECT_LE(std::abs(lhs - rhs), 1e-8 * std::abs(lhs));
}

TEST(ZetaContinued, ResidueAtOne) {
    // 4 log(3 + 2 sqrt 2) / (2 sqrt 2) and 4 log((3 + sqrt 5) / 2) / sqrt 5.
    EXPECT_NEAR(residue_at_one(sqrt2()), 2.492900960560922, 1e-13);
    EXPECT_NEAR(residue_at_one(sqrt5()), 1.7216357638560162, 1e-13);
    EXPECT_NEAR(residue_at_one(sqrt2()), 2.49292557, 1e-3 * 2.49292557);
    EXPECT_NEAR(residue_at_one(sqrt5()), 1.72177160, 1e-3 * 1.72177160);
    for (const auto* ctx : {&sqrt2(), &sqrt5()}) {
        const double eps = 1e-4;
        const double limit = eps * zeta_continued(*ctx, 1.0 + eps).value.real();
        EXPECT_LE(std::abs(limit - residue_at_one(*ctx)), 1e-3 * residue_at_one(*ctx));
    }
    EXPECT_THROW(residue_at_one(sqrt2().with_character(Eigen::VectorXi::Constant(1, 1))), Error);
}

TEST(ZetaContinued, PolesAndTrivialZeros) {
    try {
        zeta_continued(sqrt2(), 1.0);
        FAIL() << "expected pole";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Pole);
    }
    EXPECT_THROW(zeta_continued(sqrt2(), 0.0), Error);
    EXPECT_EQ(zeta_continued(sqrt2(), -2.0).value, Complex(0.0));
    const ZetaContext twisted = sqrt2().with_character(Eigen::VectorXi::Constant(1, 1));
    EXPECT_TRUE(std::isfinite(std::abs(zeta_continued(twisted, 1.0).value)));
    EXPECT_TRUE(std::isfinite(std::abs(zeta_continued(twisted, 0.0).value)));
}

TEST(ZetaContinued, ConvexitySpotCheck) {
    const ConvexityReport rep = convexity_spot_check(sqrt2(), {5.0, 10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0});
    ASSERT_EQ(rep.lines.size(), 3u);
    for (const auto& line : rep.lines) EXPECT_TRUE(line.within_bound) << line.sigma << " " << line.exponent;
    EXPECT_LE(rep.max_on_line_two, rep.z_two * (1 + 1e-12));
}
