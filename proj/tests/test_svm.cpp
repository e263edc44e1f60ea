#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "handuse/handuse.hpp"
#include "oracles.hpp"

using namespace handuse;

namespace {

TrainConfig raw_config(double C)
{
    TrainConfig cfg;
    cfg.C = C;
    cfg.tol = 1e-9;
    cfg.standardize = false;
    return cfg;
}

Dataset make(std::size_t dim, const std::vector<std::pair<std::vector<double>, int>>& rows)
{
    Dataset d(dim);
    for (const auto& [x, y] : rows) d.add(x, y);
    return d;
}

// Two Gaussian clouds in `dim` dimensions whose means are `sep` apart along a random direction.
Dataset clouds(std::mt19937_64& rng, std::size_t n, std::size_t dim, double sep)
{
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> dir(dim);
    double norm = 0.0;
    for (auto& v : dir) {
        v = g(rng);
        norm += v * v;
    }
    for (auto& v : dir) v /= std::sqrt(norm);
    Dataset d(dim);
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        const int y = i % 2 ? 1 : -1;
        for (std::size_t k = 0; k < dim; ++k) x[k] = g(rng) + 0.5 * y * sep * dir[k];
        d.add(x, y);
    }
    return d;
}

double hinge_sum(const std::vector<double>& z, const std::vector<int>& y, double b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) s += std::max(0.0, 1.0 - y[i] * (z[i] + b));
    return s;
}

} // namespace

TEST(Svm, OneDimensionalHardMargin)
{
    const auto m = train(make(1, {{{-1.0}, -1}, {{1.0}, 1}}), raw_config(100.0));
    EXPECT_NEAR(m.w[0], 1.0, 1e-3);
    EXPECT_NEAR(m.b, 0.0, 1e-3);
    const auto m2 = train(make(1, {{{0.0}, -1}, {{2.0}, 1}, {{-3.0}, -1}, {{5.0}, 1}}), raw_config(100.0));
    EXPECT_NEAR(m2.w[0], 1.0, 1e-3);
    EXPECT_NEAR(m2.b, -1.0, 1e-3);
}

// With a small C the margin constraint is not met: minimising 1/2 w^2 + 2C(1 - w) gives w = 2C.
TEST(Svm, OneDimensionalSoftMargin)
{
    const Dataset d = make(1, {{{-1.0}, -1}, {{1.0}, 1}});
    const auto m = train(d, raw_config(0.1));
    EXPECT_NEAR(m.w[0], 0.2, 1e-3);
    EXPECT_NEAR(m.b, 0.0, 1e-3);
    EXPECT_NEAR(objective(m, d, 0.1), 0.18, 1e-4);
}

TEST(Svm, SymmetricTwoDimensional)
{
    const Dataset d = make(2, {{{1, 1}, 1}, {{-1, -1}, -1}, {{2, 3}, 1}, {{-3, -2}, -1}, {{3, 1.5}, 1}});
    const auto m = train(d, raw_config(1000.0));
    EXPECT_NEAR(m.w[0], 0.5, 1e-3);
    EXPECT_NEAR(m.w[1], 0.5, 1e-3);
    EXPECT_NEAR(m.b, 0.0, 1e-3);
    EXPECT_TRUE(m.info.converged);
}

// No linear separator exists; the best is w = 0 with every point on the margin.
TEST(Svm, XorMatchesGridMinimum)
{
    const Dataset d = make(2, {{{1, 1}, 1}, {{-1, -1}, 1}, {{1, -1}, -1}, {{-1, 1}, -1}});
    for (double C : {0.1, 1.0, 10.0}) {
        const auto m = train(d, raw_config(C));
        const double grid = oracle::grid_min_objective(d, C, -2.0, 2.0, 40);
        EXPECT_NEAR(grid, 4.0 * C, 1e-12);
        EXPECT_NEAR(objective(m, d, C), grid, 0.01 * grid) << "C=" << C;
    }
}

TEST(Svm, ObjectiveAgreesWithGridOnRandomData)
{
    std::mt19937_64 rng(41);
    const Dataset d = clouds(rng, 40, 2, 1.5);
    const auto m = train(d, raw_config(0.5));
    const double grid = oracle::grid_min_objective(d, 0.5, -3.0, 3.0, 60);
    EXPECT_LE(objective(m, d, 0.5), grid * (1.0 + 1e-9));
    EXPECT_GE(objective(m, d, 0.5), grid * 0.95);
}

TEST(Svm, InitialisationsAgree)
{
    std::mt19937_64 rng(42);
    for (std::size_t dim : {1u, 3u, 5u}) {
        const Dataset d = clouds(rng, 300, dim, 2.0);
        TrainConfig a;
        a.tol = 1e-6;
        TrainConfig b = a;
        b.init = SolverInit::random;
        b.seed = 99;
        const auto ma = train(d, a), mb = train(d, b);
        const double oa = objective(ma, d, a.C), ob = objective(mb, d, b.C);
        EXPECT_LE(std::abs(oa - ob), 2.0 * a.tol * std::max(oa, ob)) << "dim " << dim;
    }
}

// No coordinate perturbation of (w, b) lowers the primal beyond the convergence tolerance.
TEST(Svm, OptimalityUnderPerturbation)
{
    std::mt19937_64 rng(43);
    const Dataset raw = clouds(rng, 200, 3, 1.0);
    TrainConfig cfg;
    cfg.tol = 1e-8;
    const auto m = train(raw, cfg);
    const Dataset d = m.transform.apply(raw);
    const double f0 = objective(m.w, m.b, d, cfg.C);
    for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
        for (std::size_t k = 0; k <= m.w.size(); ++k)
            for (double s : {-1.0, 1.0}) {
                auto w = m.w;
                double b = m.b;
                if (k < w.size())
                    w[k] += s * h;
                else
                    b += s * h;
                EXPECT_GE(objective(w, b, d, cfg.C), f0 * (1.0 - 1e-7)) << "coord " << k << " h " << h;
            }
    }
}

TEST(Svm, ObjectiveHistoryNonIncreasing)
{
    std::mt19937_64 rng(44);
    const Dataset d = clouds(rng, 500, 4, 0.8);
    const auto m = train(d, TrainConfig{});
    ASSERT_FALSE(m.info.objective_history.empty());
    for (std::size_t i = 1; i < m.info.objective_history.size(); ++i)
        EXPECT_LE(m.info.objective_history[i], m.info.objective_history[i - 1] * (1.0 + 1e-12));
    EXPECT_GE(m.info.gap, 0.0);
    EXPECT_LE(m.info.gap, 1e-6 * m.info.objective * 1.0001);
}

// With standardisation, rescaling and shifting each raw feature leaves predictions unchanged.
TEST(SvmProperties, PredictionsInvariantUnderAffineFeatureRescaling)
{
    std::mt19937_64 rng(45);
    std::uniform_int_distribution<std::size_t> udim(1, 5);
    std::uniform_real_distribution<double> lscale(-3.0, 3.0), ushift(-5.0, 5.0);
    for (int c = 0; c < 200; ++c) {
        const std::size_t dim = udim(rng);
        const Dataset d = clouds(rng, 40, dim, 1.5);
        std::vector<double> s(dim), o(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            s[k] = std::pow(10.0, lscale(rng));
            o[k] = ushift(rng) * s[k];
        }
        Dataset d2(dim);
        std::vector<double> x(dim);
        for (std::size_t i = 0; i < d.size(); ++i) {
            for (std::size_t k = 0; k < dim; ++k) x[k] = s[k] * d.row(i)[k] + o[k];
            d2.add(x, d.label(i));
        }
        TrainConfig cfg;
        cfg.tol = 1e-9;
        const auto m1 = train(d, cfg), m2 = train(d2, cfg);
        for (std::size_t i = 0; i < d.size(); ++i) {
            const double g1 = m1.margin(d.row(i)), g2 = m2.margin(d2.row(i));
            ASSERT_NEAR(g1, g2, 1e-3 * (1.0 + std::abs(g1))) << "case " << c << " row " << i;
            if (std::abs(g1) > 1e-3) {
                ASSERT_EQ(predict(m1, d.row(i)).label, predict(m2, d2.row(i)).label);
            }
        }
    }
}

TEST(SvmProperties, OptimalBiasMatchesBruteForce)
{
    std::mt19937_64 rng(46);
    std::normal_distribution<double> g(0.0, 2.0);
    std::uniform_int_distribution<std::size_t> un(2, 40);
    for (int c = 0; c < 300; ++c) {
        const std::size_t n = un(rng);
        std::vector<double> z(n);
        std::vector<int> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = g(rng);
            y[i] = i == 0 ? 1 : i == 1 ? -1 : (rng() % 2 ? 1 : -1);
        }
        const double b = detail::optimal_bias(z, y);
        double best = hinge_sum(z, y, b);
        for (std::size_t i = 0; i < n; ++i) best = std::min(best, hinge_sum(z, y, y[i] - z[i]));
        ASSERT_LE(hinge_sum(z, y, b), best + 1e-9) << "case " << c;
    }
}

TEST(Svm, RejectsBadInput)
{
    EXPECT_THROW(train(make(1, {{{1.0}, 1}, {{2.0}, 1}}), TrainConfig{}), InputError);
    EXPECT_THROW(train(make(1, {{{1.0}, 1}}), TrainConfig{}), InputError);
    Dataset d(2);
    EXPECT_THROW(d.add(std::vector<double>{1.0}, 1), InputError);
    EXPECT_THROW(d.add(std::vector<double>{1.0, 2.0}, 0), InputError);
    TrainConfig bad;
    bad.C = 0.0;
    EXPECT_THROW(train(make(1, {{{-1.0}, -1}, {{1.0}, 1}}), bad), InputError);
    EXPECT_THROW(train(make(1, {{{-1.0}, -1}, {{1.0}, 1}}), TrainConfig{}, FeatureMask::from_bits(3)), InputError);
}

TEST(Svm, ConvergenceFailureCarriesBestModel)
{
    std::mt19937_64 rng(47);
    const Dataset d = clouds(rng, 2000, 5, 0.3);
    TrainConfig cfg;
    cfg.tol = 1e-14;
    cfg.max_epochs = 1;
    cfg.C = 100.0;
    try {
        train(d, cfg);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_FALSE(e.best().info.converged);
        ASSERT_EQ(e.best().w.size(), 5u);
        for (double v : e.best().w) EXPECT_TRUE(std::isfinite(v));
        EXPECT_TRUE(std::isfinite(e.best().b));
    }
}

TEST(Svm, ModelRoundTrip)
{
    std::mt19937_64 rng(48);
    const Dataset d = clouds(rng, 100, 3, 1.0);
    const auto m = train(d, TrainConfig{}, FeatureMask::from_features({1, 3, 4}));
    std::stringstream ss;
    save_model(ss, m);
    const auto r = load_model(ss);
    EXPECT_EQ(r.mask, m.mask);
    EXPECT_EQ(r.w, m.w);
    EXPECT_EQ(r.b, m.b);
    EXPECT_EQ(r.transform.mean, m.transform.mean);
    EXPECT_EQ(r.transform.scale, m.transform.scale);
    EXPECT_EQ(r.info.converged, m.info.converged);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_EQ(r.margin(d.row(i)), m.margin(d.row(i)));

    std::stringstream bad("something else\n");
    EXPECT_THROW(load_model(bad), InputError);
}

TEST(Svm, PredictUsesMaskAndBreaksTiesToNotInUse)
{
    LinearModel m;
    m.mask = FeatureMask::from_features({2, 4});
    m.transform = Standardizer::identity(2);
    m.w = {1.0, -1.0};
    m.b = 0.0;
    FeatureVector v;
    v.f = {100, 3, 100, 1, 100};
    EXPECT_EQ(predict(m, v).label, Label::in_use);
    EXPECT_DOUBLE_EQ(predict(m, v).margin, 2.0);
    v.f[3] = 3;
    EXPECT_EQ(predict(m, v).label, Label::not_in_use);
}
