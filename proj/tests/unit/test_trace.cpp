#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hmftrace/error.hpp"
#include "hmftrace/lattice.hpp"
#include "hmftrace/modgroup.hpp"
#include "hmftrace/trace.hpp"
#include "hmftrace/zeta.hpp"

using namespace hmf;
using std::numbers::pi;

namespace {

const Complex I(0.0, 1.0);

Eigen::VectorXd vec(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

Eigen::VectorXcd cvec(Complex a, Complex b) {
    Eigen::VectorXcd v(2);
    v << a, b;
    return v;
}

const FieldEmbedding& qsqrt2() {
    static const FieldEmbedding k = make_quadratic_field(2);
    return k;
}

const TransformTriple& standard_triple() {
    static const TransformTriple t(TestFunction::standard(2));
    return t;
}

double rel(Complex a, Complex b) { return std::abs(a - b) / std::abs(b); }

Evaluator power_form(double s) {
    return [s](const PointN& z) { return Complex(std::pow(z[0].imag() * z[1].imag(), s)); };
}

}  // namespace

TEST(Elliptic, ZeroTestFunction) {
    const auto t = elliptic_term(TestFunction::zero(2), vec(pi / 2, pi / 2), 1, 1.0, cvec(0.0, 0.0));
    EXPECT_EQ(t.value, Complex(0.0));
    EXPECT_FALSE(t.a_dependent);
}

TEST(Elliptic, DegenerateAngle) {
    const auto psi = TestFunction::standard(2);
    EXPECT_THROW(elliptic_term(psi, vec(0.0, pi / 2), 1, 1.0, cvec(0.0, 0.0)), Error);
    EXPECT_THROW(elliptic_term(psi, vec(pi / 2, pi), 1, 1.0, cvec(0.0, 0.0)), Error);
    EXPECT_THROW(elliptic_term(psi, vec(pi / 2, pi / 2), 0, 1.0, cvec(0.0, 0.0)), Error);
}

TEST(Elliptic, MatchesDirectQuadratureAtMuZero) {
    const auto psi = TestFunction::standard(2);
    const auto t = elliptic_term(psi, vec(pi / 2, pi / 2), 1, 1.0, cvec(0.0, 0.0));
    const double R = std::asinh(1.5);
    auto f = [&](const std::vector<double>& r) {
        return psi(vec(4 * std::sinh(r[0]) * std::sinh(r[0]), 4 * std::sinh(r[1]) * std::sinh(r[1]))) *
               std::sinh(r[0]) * std::sinh(r[1]);
    };
    const double direct = 4 * pi * pi * quad::integrate_box<double>(f, {0.0, 0.0}, {R, R}).value;
    EXPECT_LT(rel(t.value, direct), 1e-8);
}

TEST(Elliptic, MatchesOracle) {
    const auto psi = TestFunction::standard(2);
    const double s = 0.6;
    const auto rot = GroupElementN::rotation(vec(pi / 2, pi / 2));
    TraceOptions opt;
    opt.rel_tol = 1e-5;
    const auto oracle = elliptic_oracle(psi, rot, power_form(s), opt);
    const Complex mu = s * (s - 1);
    const auto t = elliptic_term(psi, vec(pi / 2, pi / 2), 1, 1.0, cvec(mu, mu));
    EXPECT_LT(rel(t.value, oracle.value), 1e-3);
}

TEST(Elliptic, OracleConstantFormMatchesMuZero) {
    const auto psi = TestFunction::standard(2);
    const auto rot = GroupElementN::rotation(vec(pi / 3, 2 * pi / 3));
    TraceOptions opt;
    opt.rel_tol = 1e-5;
    const auto oracle = elliptic_oracle(psi, rot, [](const PointN&) { return Complex(1.0); }, opt);
    const auto t = elliptic_term(psi, vec(pi / 3, 2 * pi / 3), 1, 1.0, cvec(0.0, 0.0));
    EXPECT_LT(rel(t.value, oracle.value), 1e-3);
}

TEST(Mixed, SupportVanishing) {
    const auto psi = TestFunction::standard(2);
    // N + 1/N - 2 = 10.1 > 9.
    const double N = 11.0;
    const auto t = mixed_term(psi, Eigen::VectorXd::Constant(1, N), Eigen::VectorXd::Constant(1, pi / 2), 1.0,
                              cvec(0.0, 0.0));
    EXPECT_EQ(t.value, Complex(0.0));
    EXPECT_THROW(mixed_term(psi, Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, pi / 2), 1.0,
                            cvec(0.0, 0.0)),
                 Error);
}

TEST(Mixed, MatchesOracle) {
    const auto psi = TestFunction::standard(2);
    const double N = 4.0, period = 4.0;
    Eigen::VectorXd a(2), b(2), c(2), d(2);
    a << 2.0, 0.0;
    b << 0.0, -1.0;
    c << 0.0, 1.0;
    d << 0.5, 0.0;
    const auto nu = GroupElementN::from_real(a, b, c, d);
    TraceOptions opt;
    opt.rel_tol = 1e-4;
    opt.angle_nodes = 16;
    const auto oracle = mixed_oracle(psi, nu, period, [](const PointN&) { return Complex(1.0); }, opt);
    const auto t = mixed_term(psi, Eigen::VectorXd::Constant(1, N), Eigen::VectorXd::Constant(1, pi / 2),
                              std::log(period), cvec(0.0, 0.0));
    EXPECT_LT(rel(t.value, oracle.value), 1e-2);
}

TEST(Mixed, CentralizerIntegral) {
    const double N = 5.0;
    const Parallelotope cell{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Constant(1, 1, std::log(N)), false};
    const auto id = GroupElementN::identity(2);
    EXPECT_NEAR(F0_of_centralizer([](const PointN&) { return Complex(1.0); }, id, cell, 1).real(), std::log(N), 1e-12);

    const auto rho = GroupElementN::from_real(vec(1.0, 2.0), vec(0.0, 0.0), vec(0.0, 0.0), vec(1.0, 0.5));
    const Complex sep = F0_of_centralizer([](const PointN& z) { return Complex(std::pow(z[1].imag(), 0.3)); }, rho, cell, 1);
    EXPECT_NEAR(sep.real(), std::log(N) * std::pow(4.0, 0.3), 1e-10);

    auto periodic = [N](const PointN& z) { return Complex(2.0 + std::cos(2 * pi * std::log(z[0].imag()) / std::log(N))); };
    const Complex base = F0_of_centralizer(periodic, id, cell, 1);
    Parallelotope shifted = cell;
    shifted.anchor[0] = 0.37;
    EXPECT_NEAR(std::abs(F0_of_centralizer(periodic, id, shifted, 1) - base), 0.0, 1e-8);
    EXPECT_NEAR(base.real(), 2 * std::log(N), 1e-8);

    const Parallelotope flat{Eigen::VectorXd::Zero(1), Eigen::MatrixXd::Zero(1, 1), false};
    EXPECT_THROW(F0_of_centralizer(periodic, id, flat, 1), Error);
}

TEST(Mixed, ConjugatorDiagonalizes) {
    const auto& k = qsqrt2();
    const auto g = GroupElementN::from_field(k, FieldElement::from_ints(0, 0), FieldElement::from_ints(-1, 0),
                                             FieldElement::from_ints(1, 0), FieldElement::from_ints(1, 1));
    const auto cls = classify(g);
    ASSERT_EQ(cls.kind, ElementKind::Mixed);
    const auto rho = centralizer_conjugator(g);
    const auto conj = rho.inverse() * g * rho;
    const double sn = std::sqrt(cls.norms[0]);
    EXPECT_NEAR(std::abs(conj.a[0]), sn, 1e-10);
    EXPECT_NEAR(std::abs(conj.d[0]), 1.0 / sn, 1e-10);
    EXPECT_NEAR(conj.c[0], 0.0, 1e-10);
    EXPECT_NEAR(conj.b[0], 0.0, 1e-10);
    // The attracting point goes to infinity: z -> N z.
    EXPECT_NEAR(conj.a[0] / conj.d[0], cls.norms[0], 1e-9);
    EXPECT_NEAR(std::abs(conj.a[1] - conj.d[1]), 0.0, 1e-10);
    EXPECT_NEAR(std::abs(conj.b[1] + conj.c[1]), 0.0, 1e-10);
}

TEST(HypPar, MainTermExample) {
    const auto& k = qsqrt2();
    const auto form = demo_eisenstein_form(k, 0.8, Eigen::VectorXi::Zero(1));
    const auto& tr = standard_triple();
    const auto t = hyp_par_main_term(100.0, tr, form);
    const double g = tr.Q(vec(4.0, 4.0));
    const double expected = 3.52549434 / 2 * std::pow(100.0, 0.8) / 0.8 * 2 * g;
    EXPECT_LT(rel(t.value, expected), 1e-8);
    EXPECT_EQ(contributing_multipliers(form.multipliers, tr).size(), 2u);
    EXPECT_TRUE(t.a_dependent);

    Eigen::VectorXi m1(1);
    m1 << 1;
    const auto twisted = demo_eisenstein_form(k, 0.8, m1);
    EXPECT_EQ(hyp_par_main_term(100.0, tr, twisted).value, Complex(0.0));
    EXPECT_EQ(hyp_par_main_term(100.0, tr, cusp_form_zero(k)).value, Complex(0.0));
}

TEST(HypPar, ThetaFactorIdentity) {
    const auto& k = qsqrt2();
    const auto M = hilbert_multipliers(k);
    Eigen::VectorXi m(1);
    m << 1;
    const Eigen::VectorXd E = hyp_par_E(M, m);
    EXPECT_NEAR(E[0], -2.0, 1e-12);
    EXPECT_NEAR(E[1], 2.0, 1e-12);
    const auto& tr = standard_triple();
    const auto psi = tr.source();
    const Complex theta = hyp_par_theta_factor(psi, E, cvec(0.0, 0.0));
    const Eigen::VectorXd log_u = M.E.col(1);
    EXPECT_LT(rel(theta, tr.g(log_u) / 4.0), 1e-7);

    const Complex mu = 0.8 * (0.8 - 1.0);
    const Complex folded = hyp_par_theta_factor(psi, E, cvec(mu, mu), true);
    const Complex unfolded = hyp_par_theta_factor(psi, E, cvec(mu, mu), false);
    EXPECT_LT(rel(folded, unfolded), 1e-10);

    EXPECT_EQ(hyp_par_theta_factor(TestFunction::zero(2), E, cvec(0.0, 0.0)), Complex(0.0));
    EXPECT_THROW(hyp_par_theta_factor(psi, vec(0.0, 2.0), cvec(0.0, 0.0)), Error);
}

TEST(HypPar, CountingIdentity) {
    const auto& k = qsqrt2();
    const auto eps = fundamental_totally_positive_unit_exact(k);
    const auto classes = quotient_reps_mod_units(ring_of_integers_module(k), eps, eps);
    int total = 0;
    for (const auto& c : classes) total += c.orbit_size;
    const auto M = hilbert_multipliers(k);
    Eigen::VectorXi m(1);
    m << 1;
    const Eigen::VectorXd E = hyp_par_E(M, m);
    EXPECT_EQ(total, 4);
    EXPECT_NEAR(std::abs(E.prod()), 4.0, 1e-10);
}

TEST(HypPar, CTerm) {
    const Complex theta(0.3, -0.1);
    Eigen::MatrixXd G(2, 2);
    G << 1.0, 0.5, -0.2, 2.0;
    const Parallelotope cell{Eigen::VectorXd::Zero(2), G, false};
    const auto zero = hyp_par_C_term(theta, [](const Eigen::VectorXd&) { return Complex(0.0); }, cell);
    EXPECT_EQ(zero.value, Complex(0.0));
    const auto one = hyp_par_C_term(theta, [](const Eigen::VectorXd&) { return Complex(1.0); }, cell);
    EXPECT_LT(rel(one.value, 0.5 * std::abs(G.determinant()) * theta), 1e-12);

    const auto M = hilbert_multipliers(qsqrt2());
    const Parallelotope line{Eigen::VectorXd::Zero(2), M.E.col(1), true};
    auto decaying = [](const Eigen::VectorXd& r) {
        const double nr = r.prod();
        return Complex(std::exp(-(nr + 1.0 / nr)));
    };
    TraceOptions coarse;
    coarse.rel_tol = 1e-7;
    const auto a = hyp_par_C_term(1.0, decaying, line, coarse);
    const auto b = hyp_par_C_term(1.0, decaying, line);
    EXPECT_TRUE(std::isfinite(b.value.real()));
    EXPECT_GT(b.value.real(), 0.0);
    EXPECT_LT(rel(a.value, b.value), 1e-6);
    // int over tau of exp(-2 cosh(sqrt 2 tau)) d tau = 2 K_0(2) / sqrt 2, times the cell jacobian.
    const double k0_2 = 0.11389387274953344;
    EXPECT_LT(rel(b.value, 0.5 * line.jacobian() * std::sqrt(2.0) * k0_2), 1e-8);

    EXPECT_THROW(hyp_par_C_term(1.0, [](const Eigen::VectorXd& r) { return Complex(r.prod()); }, line), Error);
}

TEST(Parabolic, F0Symmetry) {
    const auto psi = TestFunction::standard(2);
    EXPECT_EQ(F0_direct(TestFunction::zero(2), cvec(0.7, 0.7)), Complex(0.0));
    const Complex f = F0_direct(psi, cvec(0.5, 0.5));
    const Complex ft = F0tilde_direct(psi, cvec(0.5, 0.5));
    EXPECT_LT(rel(f, ft), 1e-12);
    EXPECT_THROW(F0_direct(psi, cvec(1.2, 0.5)), Error);
    EXPECT_THROW(F0tilde_direct(psi, cvec(0.5, 0.0)), Error);
}

TEST(Parabolic, IntegralOfPsiIsHalfG0) {
    // 2^n F(s) = int over R^n of psi(t^2) dt = Q(0) = g(0).
    const auto& tr = standard_triple();
    const auto psi = tr.source();
    auto f = [&](const std::vector<double>& t) { return psi(vec(t[0] * t[0], t[1] * t[1])); };
    const double F = quad::integrate_box<double>(f, {0.0, 0.0}, {3.0, 3.0}).value;
    EXPECT_LT(std::abs(4.0 * F - tr.g(vec(0.0, 0.0))) / tr.g(vec(0.0, 0.0)), 1e-7);
}

TEST(Parabolic, GammaFormulaMatchesDirect) {
    const auto& tr = standard_triple();
    const HGrid grid = tr.h_grid();
    for (double s : {0.6, 0.7, 0.8}) {
        const Eigen::VectorXcd sk = cvec(s, s);
        const Complex direct = F0_direct(tr.source(), sk);
        const Complex direct_t = F0tilde_direct(tr.source(), sk);
        EXPECT_LT(rel(F0_gamma_formula(grid, sk).value, direct), 1e-4) << "s = " << s;
        EXPECT_LT(rel(F0tilde_gamma_formula(grid, sk).value, direct_t), 1e-4) << "s = " << s;
    }
    HGrid empty = grid;
    empty.amplitude = 0.0;
    EXPECT_EQ(F0_gamma_formula(empty, cvec(0.7, 0.7)).value, Complex(0.0));
}

TEST(Parabolic, GammaFormulaSeparates) {
    const TransformTriple one(TestFunction::standard(1));
    const HGrid g1 = one.h_grid();
    const HGrid g2 = standard_triple().h_grid();
    const Eigen::VectorXcd s1 = Eigen::VectorXcd::Constant(1, 0.7);
    const Complex single = F0_gamma_formula(g1, s1).value;
    EXPECT_LT(rel(F0_gamma_formula(g2, cvec(0.7, 0.7)).value, single * single), 1e-8);
}

TEST(Parabolic, TermExample) {
    const auto& k = qsqrt2();
    const auto form = demo_eisenstein_form(k, 0.8, Eigen::VectorXi::Zero(1));
    const auto& tr = standard_triple();
    const auto t = parabolic_term(100.0, tr, form);
    const Complex Z = zeta_continued(hilbert_zeta_context(k, 0), 0.2).value;
    const Complex F = F0_direct(tr.source(), cvec(0.8, 0.8));
    const Complex expected =
        3.52549434 / 2 * std::pow(100.0, 0.8) / 0.8 * tr.g(vec(0.0, 0.0)) + 2.82842712 * Z * F;
    EXPECT_LT(rel(t.value, expected), 1e-8);
    EXPECT_EQ(parabolic_term(100.0, tr, cusp_form_zero(k)).value, Complex(0.0));
    const auto outside = demo_eisenstein_form(k, 1.5, Eigen::VectorXi::Zero(1));
    EXPECT_THROW(parabolic_term(100.0, tr, outside), Error);
}

TEST(Assembly, EmptyInventoryCuspForm) {
    const auto rep = assemble_geometric_trace(100.0, standard_triple(), cusp_form_zero(qsqrt2()), {});
    EXPECT_EQ(rep.parabolic.value, Complex(0.0));
    EXPECT_EQ(rep.hyp_par.value, Complex(0.0));
    EXPECT_EQ(rep.total.value, Complex(0.0));
}

TEST(Assembly, DemoInventoryIsFinite) {
    const auto& k = qsqrt2();
    const auto& tr = standard_triple();
    const auto form = demo_eisenstein_form(k, 0.8, Eigen::VectorXi::Zero(1));
    const auto inv = demo_inventory(k, tr, form);
    EXPECT_EQ(inv.elliptic.size(), 3u);
    EXPECT_EQ(inv.mixed.size(), 1u);
    EXPECT_GE(inv.hyp_par.size(), 2u);
    const auto rep = assemble_geometric_trace(100.0, tr, form, inv);
    for (const TermResult* t : {&rep.elliptic, &rep.mixed, &rep.parabolic, &rep.hyp_par, &rep.total}) {
        EXPECT_TRUE(std::isfinite(t->value.real()) && std::isfinite(t->value.imag()));
        EXPECT_GE(t->error_estimate, 0.0);
        for (const auto& [name, v] : t->components) EXPECT_TRUE(std::isfinite(std::abs(v))) << name;
    }
    const auto main = hyp_par_main_term(100.0, tr, form);
    const auto par = parabolic_term(100.0, tr, form);
    EXPECT_LT(std::abs(rep.total.a_s_coeff - (main.a_s_coeff + par.a_s_coeff)), 1e-12 * std::abs(rep.total.a_s_coeff));
    EXPECT_LT(std::abs(rep.total.a_1ms_coeff - (main.a_1ms_coeff + par.a_1ms_coeff)), 1e-12);
    EXPECT_THROW(demo_inventory(make_quadratic_field(3), tr, form), Error);
}
