#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hmftrace/error.hpp"
#include "hmftrace/quadrature.hpp"
#include "hmftrace/transforms.hpp"

using namespace hmf;
using std::numbers::pi;

namespace {

Eigen::VectorXd vec(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

// Q by a full 2-D iterated integral with t = w + (hi - w)(1 - cos phi)/2, so dt / sqrt(t - w) = sqrt(hi - w) cos(phi/2).
double q_oracle(const TestFunction& psi, const Eigen::VectorXd& w) {
    std::vector<double> lo(2, 0.0), hi(2, pi);
    Eigen::VectorXd len(2);
    for (int k = 0; k < 2; ++k) {
        len[k] = psi.support_upper(k) - w[k];
        if (len[k] <= 0) return 0.0;
    }
    auto f = [&](const std::vector<double>& phi) {
        Eigen::VectorXd t(2);
        double jac = 1.0;
        for (int k = 0; k < 2; ++k) {
            t[k] = w[k] + len[k] * 0.5 * (1.0 - std::cos(phi[k]));
            jac *= std::sqrt(len[k]) * std::cos(0.5 * phi[k]);
        }
        return psi(t) * jac;
    };
    quad::Options opt;
    opt.rel_tol = 1e-10;
    opt.abs_tol = 1e-16;
    return quad::integrate_box<double>(f, lo, hi, opt).value;
}

const TransformTriple& standard_triple() {
    static const TransformTriple triple(TestFunction::standard(2));
    return triple;
}

const HGrid& standard_grid() {
    static const HGrid grid = standard_triple().h_grid();
    return grid;
}

}  // namespace

TEST(TestFunction, Bump) {
    const auto psi = TestFunction::standard(2);
    EXPECT_NEAR(psi(vec(4.5, 4.5)), std::exp(-2.0), 1e-15);
    EXPECT_EQ(psi(vec(9.0, 1.0)), 0.0);
    EXPECT_EQ(psi(vec(-0.1, 4.5)), 0.0);
    EXPECT_EQ(TestFunction::zero(2)(vec(4.5, 4.5)), 0.0);
    const auto clipped = TestFunction::bump(vec(1.0, 4.5), vec(2.0, 4.5));
    EXPECT_EQ(clipped.support_lower(0), 0.0);
    EXPECT_EQ(clipped(vec(-0.5, 4.5)), 0.0);
    EXPECT_GT(clipped(vec(0.5, 4.5)), 0.0);
    EXPECT_THROW(TestFunction::bump(vec(1.0, 1.0), vec(0.0, 1.0)), Error);
}

TEST(Transforms, QExamples) {
    EXPECT_EQ(Q_of(TestFunction::zero(2), vec(0.0, 0.0)), 0.0);
    const auto psi = TestFunction::standard(2);
    EXPECT_EQ(Q_of(psi, vec(9.0, 0.0)), 0.0);
    EXPECT_EQ(Q_of(psi, vec(1.0, 12.0)), 0.0);
    const double q = Q_of(psi, vec(0.0, 0.0));
    EXPECT_LE(std::abs(q - q_oracle(psi, vec(0.0, 0.0))), 1e-6 * q);
    EXPECT_NEAR(q, 1.0208827148253776 * 1.0208827148253776, 1e-11);
}

TEST(Transforms, QAgainstOracle) {
    const auto psi = TestFunction::bump(vec(4.5, 3.0), vec(4.5, 2.0), 1.7);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d0(0.0, 8.5), d1(0.0, 4.8);
    for (int i = 0; i < 6; ++i) {
        const Eigen::VectorXd w = vec(d0(rng), d1(rng));
        const double q = Q_of(psi, w), ref = q_oracle(psi, w);
        EXPECT_LE(std::abs(q - ref), 1e-6 * std::abs(ref) + 1e-14) << w.transpose();
    }
}

TEST(Transforms, PositivityAndSupport) {
    const auto& tr = standard_triple();
    for (double a = 0.0; a < 10.0; a += 0.7)
        for (double b = 0.0; b < 10.0; b += 0.9) EXPECT_GE(tr.Q(vec(a, b)), 0.0);
    // g(u) = 0 once 4 sinh^2(u_k/2) exceeds the support bound 9.
    for (double u = -3.0; u <= 3.0; u += 0.11) {
        const double s = std::sinh(0.5 * u);
        const double g = tr.g(vec(u, 0.3));
        if (4 * s * s >= 9.0)
            EXPECT_EQ(g, 0.0) << u;
        else
            EXPECT_GE(g, 0.0);
    }
    EXPECT_NEAR(tr.g_support(0), 2.0 * std::asinh(1.5), 1e-15);
}

TEST(Transforms, GEvenAndAtZero) {
    const auto psi = TestFunction::bump(vec(4.5, 3.0), vec(4.5, 2.0));
    const TransformTriple tr(psi);
    for (double a : {0.1, 0.8, 1.9})
        for (double b : {-0.4, 0.2, 1.1}) {
            const double g = tr.g(vec(a, b));
            EXPECT_NEAR(tr.g(vec(-a, b)), g, 1e-10);
            EXPECT_NEAR(tr.g(vec(a, -b)), g, 1e-10);
            EXPECT_NEAR(g_of(psi, vec(a, b)), g, 1e-12);
        }
    EXPECT_EQ(tr.g(vec(0.0, 0.0)), tr.Q(vec(0.0, 0.0)));
}

TEST(Transforms, GAtUnitLogarithms) {
    // Over Q(sqrt 2): log(3 + 2 sqrt 2) gives argument 4 < 9; its double gives 32 > 9.
    const auto& tr = standard_triple();
    const double l = std::log(3.0 + 2.0 * std::sqrt(2.0));
    const double s1 = std::sinh(0.5 * l);
    EXPECT_NEAR(4 * s1 * s1, 4.0, 1e-12);
    EXPECT_GT(tr.g(vec(l, -l)), 0.0);
    EXPECT_GT(tr.g(vec(-l, l)), 0.0);
    EXPECT_EQ(tr.g(vec(2 * l, -2 * l)), 0.0);
    EXPECT_EQ(tr.g(vec(-2 * l, 2 * l)), 0.0);
    EXPECT_NEAR(tr.g(vec(l, -l)), tr.Q(vec(4.0, 4.0)), 1e-13);
}

TEST(Transforms, HAtZeroIsIntegralOfG) {
    const auto& tr = standard_triple();
    const double U = tr.g_support(0);
    quad::Options opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-13;
    auto f = [&](const std::vector<double>& u) { return g_of(tr.source(), vec(u[0], u[1])); };
    const double direct = quad::integrate_box<double>(f, {-U, -U}, {U, U}, opt).value;
    EXPECT_LE(std::abs(tr.h(vec(0.0, 0.0)) - direct), 1e-8 * direct);
    EXPECT_NEAR(h_of(tr.source(), vec(0.0, 0.0)).real(), direct, 1e-8 * direct);
}

TEST(Transforms, HEvenRealAndZero) {
    const auto psi = TestFunction::bump(vec(4.5, 3.0), vec(4.5, 2.0));
    const TransformTriple tr(psi);
    for (double a : {0.3, 2.0, 7.5})
        for (double b : {-1.0, 4.0}) {
            const double h = tr.h(vec(a, b));
            EXPECT_NEAR(tr.h(vec(-a, -b)), h, 1e-8);
            EXPECT_NEAR(tr.h(vec(-a, b)), h, 1e-8);
        }
    EXPECT_EQ(h_of(TestFunction::zero(2), vec(1.0, 2.0)), Complex(0.0));
    EXPECT_EQ(h_of(psi, vec(0.5, 0.5)).imag(), 0.0);
}

TEST(Transforms, HDecay) {
    // |h_1(r)| (1 + r)^6 is bounded on the grid: the sup over [0, 1000] is attained early and the tail is smaller.
    const auto& tr = standard_triple();
    auto envelope = [&](double r0, double r1) {
        double m = 0.0;
        for (double r = r0; r < r1; r += 0.05) m = std::max(m, std::abs(tr.h1(0, r)) * std::pow(1.0 + r, 6));
        return m;
    };
    const double early = envelope(0.0, 400.0);
    const double late = envelope(600.0, 1000.0);
    EXPECT_LE(late, 0.5 * early);
    EXPECT_LE(envelope(900.0, 1000.0), 0.1 * early);
}

TEST(Transforms, InverseFourierRoundTrip) {
    const auto& tr = standard_triple();
    const auto& grid = standard_grid();
    EXPECT_NEAR(g_from_h(grid, vec(0.0, 0.0)), tr.g(vec(0.0, 0.0)), 1e-5);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-tr.g_support(0), tr.g_support(0));
    for (int i = 0; i < 10; ++i) {
        const Eigen::VectorXd u = vec(d(rng), d(rng));
        EXPECT_NEAR(g_from_h(grid, u), tr.g(u), 1e-5) << u.transpose();
    }
    const HGrid zero = TransformTriple(TestFunction::zero(2)).h_grid(50.0);
    EXPECT_EQ(g_from_h(zero, vec(0.3, 0.1)), 0.0);
    const HGrid shortgrid = tr.h_grid(3.0);
    try {
        g_from_h(shortgrid, vec(0.0, 0.0));
        FAIL() << "expected accuracy error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Accuracy);
    }
}

TEST(Transforms, PsiFromQ) {
    const auto& tr = standard_triple();
    const auto& psi = tr.source();
    Eigen::VectorXd hi = vec(9.0, 9.0), step = vec(4.5e-3, 4.5e-3);
    EXPECT_EQ(psi_from_Q([](const Eigen::VectorXd&) { return 0.0; }, vec(1.0, 1.0), hi, step).value, 0.0);
    const double center = psi_from_Q(tr, vec(4.5, 4.5));
    EXPECT_LE(std::abs(center - psi(vec(4.5, 4.5))), 1e-3 * psi(vec(4.5, 4.5)));
    for (auto t : {vec(3.0, 5.5), vec(6.2, 2.4)})
        EXPECT_LE(std::abs(psi_from_Q(tr, t) - psi(t)), 1e-3 * psi(t)) << t.transpose();
    EXPECT_LE(std::abs(psi_from_Q(tr, vec(9.5, 3.0))), 1e-6);
    EXPECT_LE(std::abs(psi_from_Q(tr, vec(8.9999, 3.0))), 1e-6);
}
