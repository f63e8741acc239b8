#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "skillforge/elastic_map.hpp"
#include "skillforge/error.hpp"
#include "support.hpp"

using namespace skillforge;
using namespace testsupport;

namespace {

ElasticMap bare_map(Matrix nodes, double lambda, double mu) {
    ElasticMap m;
    m.nodes = std::move(nodes);
    m.lambda = lambda;
    m.mu = mu;
    return m;
}

Matrix segment(std::size_t n) {
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), 2);
    for (std::size_t i = 0; i < n; ++i) p(static_cast<Eigen::Index>(i), 0) = static_cast<double>(i) / static_cast<double>(n - 1);
    return p;
}

// Direct re-summation of all three energies.
Energy energy_oracle(const ElasticMap& map, const Matrix& pts, const Assignment& asg) {
    Energy e;
    double wsum = 0;
    for (Eigen::Index j = 0; j < pts.rows(); ++j) {
        const auto owner = static_cast<Eigen::Index>(asg.owner[static_cast<std::size_t>(j)]);
        double sq = 0;
        for (Eigen::Index c = 0; c < pts.cols(); ++c) sq += std::pow(pts(j, c) - map.nodes(owner, c), 2);
        e.data += asg.weights(j) * sq;
        wsum += asg.weights(j);
    }
    e.data /= wsum;
    const auto k = map.nodes.rows();
    for (Eigen::Index i = 0; i + 1 < k; ++i)
        for (Eigen::Index c = 0; c < pts.cols(); ++c) e.stretch += std::pow(map.nodes(i + 1, c) - map.nodes(i, c), 2);
    for (Eigen::Index i = 1; i + 1 < k; ++i)
        for (Eigen::Index c = 0; c < pts.cols(); ++c)
            e.bend += std::pow(map.nodes(i - 1, c) - 2 * map.nodes(i, c) + map.nodes(i + 1, c), 2);
    e.stretch *= map.lambda;
    e.bend *= map.mu;
    e.total = e.data + e.stretch + e.bend;
    return e;
}

}  // namespace

TEST(Energy, CollinearNodesNoData) {
    Matrix nodes(3, 2);
    nodes << 0, 0, 1, 0, 2, 0;
    const auto e = energy(bare_map(nodes, 1, 1), Matrix(0, 2), Assignment{{}, Vector(0)});
    EXPECT_EQ(e.stretch, 2.0);
    EXPECT_EQ(e.bend, 0.0);
    EXPECT_EQ(e.data, 0.0);
}

TEST(Energy, SinglePoint) {
    Matrix nodes(3, 2);
    nodes << 0, 0, 5, 5, 9, 9;
    Matrix pts(1, 2);
    pts << 0, 1;
    const auto e = energy(bare_map(nodes, 0, 0), pts, Assignment{{0}, Vector::Ones(1)});
    EXPECT_EQ(e.data, 1.0);
}

TEST(Energy, IllPosedWithoutDataOrSprings) {
    try {
        (void)energy(bare_map(Matrix::Zero(3, 2), 0, 0), Matrix(0, 2), Assignment{{}, Vector(0)});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.name(), "elastic_map:ill-posed-energy");
    }
}

TEST(Energy, MatchesResummationOracle) {
    Rng rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const auto map = bare_map(random_matrix(rng, 5, 2), uni(rng, 0, 1), uni(rng, 0, 1));
        const Matrix pts = random_matrix(rng, 20, 2);
        Vector w(20);
        for (int j = 0; j < 20; ++j) w(j) = uni(rng, 0.1, 3);
        const auto asg = nearest_assignment(map.nodes, pts, w);
        const auto got = energy(map, pts, asg), want = energy_oracle(map, pts, asg);
        EXPECT_NEAR(got.data, want.data, 1e-12);
        EXPECT_NEAR(got.stretch, want.stretch, 1e-12);
        EXPECT_NEAR(got.bend, want.bend, 1e-12);
    }
}

TEST(Energy, GradientMatchesFiniteDifferences) {
    Rng rng(22);
    for (int trial = 0; trial < 20; ++trial) {
        const auto map = bare_map(random_matrix(rng, 8, 2), uni(rng, 0.01, 1), uni(rng, 0.01, 1));
        const Matrix pts = random_matrix(rng, 40, 2);
        const auto asg = nearest_assignment(map.nodes, pts, Vector::Ones(40));
        const Matrix fd = fd_gradient(
            [&](const Matrix& x) { return energy(bare_map(x, map.lambda, map.mu), pts, asg).total; }, map.nodes);
        EXPECT_LT(rel_err(energy_gradient(map, pts, asg), fd), 1e-6);
    }
}

TEST(Assignment, TiesGoToLowerIndex) {
    Matrix nodes(3, 1);
    nodes << 0, 2, 4;
    Matrix pts(2, 1);
    pts << 1, 3;
    const auto asg = nearest_assignment(nodes, pts, Vector::Ones(2));
    EXPECT_EQ(asg.owner, (std::vector<std::size_t>{0, 1}));
    EXPECT_THROW((void)nearest_assignment(nodes, pts, Vector::Zero(2)), Error);
}

TEST(Strategy, NineNamedCells) {
    const auto all = Strategy::all();
    ASSERT_EQ(all.size(), 9u);
    for (int i = 1; i <= 9; ++i) EXPECT_EQ(Strategy::from_index(i).index(), i);
    EXPECT_EQ(Strategy::from_index(6).name(), "init2-weight3 (arc_length, endpoint)");
    EXPECT_THROW((void)Strategy::from_index(10), Error);
}

TEST(Construct, LineInitialisations) {
    const DemoSet demos({uniform_traj(segment(50))});
    const auto tu = construct(demos, 5, {InitScheme::TimeUniform, WeightScheme::Uniform});
    for (Eigen::Index i = 0; i < 5; ++i) {
        EXPECT_NEAR(tu.nodes(i, 0), 0.25 * static_cast<double>(i), 1e-15);
        EXPECT_EQ(tu.nodes(i, 1), 0.0);
    }
    const auto al = construct(demos, 5, {InitScheme::ArcLength, WeightScheme::Uniform});
    EXPECT_LT((al.nodes - tu.nodes).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_EQ(tu.lambda, default_lambda(5));
    EXPECT_EQ(tu.mu, default_mu(5));
}

TEST(Construct, RejectsBadNodeCounts) {
    const DemoSet demos({uniform_traj(segment(6))});
    EXPECT_THROW((void)construct(demos, 7, {}), Error);
    EXPECT_THROW((void)construct(demos, 2, {}), Error);
}

TEST(Weights, CurvatureFavoursTheCorner) {
    Matrix l(21, 2);
    for (int i = 0; i <= 10; ++i) l.row(i) << 0, i * 0.1;
    for (int i = 11; i <= 20; ++i) l.row(i) << (i - 10) * 0.1, 1.0;
    const auto w = data_weights(uniform_traj(l), WeightScheme::Curvature);
    const Matrix d2 = second_differences(l);
    Eigen::Index corner = 0;
    d2.rowwise().norm().maxCoeff(&corner);
    EXPECT_EQ(corner + 1, 10);
    EXPECT_GT(w(10), w(5));
    EXPECT_GT(w(10), w(15));
    const auto e = data_weights(uniform_traj(l), WeightScheme::EndpointBoosted);
    EXPECT_EQ(e(0), 10.0);
    EXPECT_EQ(e(20), 10.0);
    EXPECT_EQ(e(10), 1.0);
}

TEST(Fit, SegmentDataLandsOnSegment) {
    const Matrix pts = segment(200);
    const DemoSet demos({uniform_traj(pts)});
    const auto res = fit(construct(demos, 5, {}, 1e-6, 1e-6), demos);
    EXPECT_LT(res.map.nodes.col(1).cwiseAbs().maxCoeff(), 1e-6);
    // Dense one-shot solve at the final assignment.
    const auto s = summarize(5, pts, res.assignment);
    const Matrix e = edge_operator(5), r = rib_operator(5);
    const Matrix a = Matrix(s.mass.asDiagonal()) + 1e-6 * e.transpose() * e + 1e-6 * r.transpose() * r;
    EXPECT_LT((res.map.nodes - a.fullPivLu().solve(s.moment)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Fit, StiffBendingStraightensAnArc) {
    Matrix arc(60, 2);
    for (int i = 0; i < 60; ++i) {
        const double a = std::numbers::pi * i / 59.0;
        arc.row(i) << std::cos(a), std::sin(a);
    }
    const DemoSet demos({uniform_traj(arc)});
    const auto res = fit(construct(demos, 10, {}, 1e-3, 1e6), demos);
    EXPECT_LT(second_differences(res.map.nodes).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(Fit, NoisySineDescendsAndSettles) {
    Rng rng(23);
    Matrix p(150, 2);
    for (int i = 0; i < 150; ++i) {
        const double s = i / 149.0;
        p.row(i) << s, std::sin(2 * std::numbers::pi * s) + 0.03 * uni(rng);
    }
    const DemoSet demos({uniform_traj(p)});
    for (const auto& strategy : Strategy::all()) {
        const auto res = fit(construct(demos, 20, strategy), demos);
        for (std::size_t i = 1; i < res.trace.size(); ++i) EXPECT_LE(res.trace[i], res.trace[i - 1]);
        EXPECT_LT((node_problem(res.map).minimizer() - res.map.nodes).cwiseAbs().maxCoeff(), 1e-8);
        const Matrix again = node_problem(20, res.map.lambda, res.map.mu, summarize(20, p, res.assignment)).minimizer();
        EXPECT_EQ(again, res.map.nodes);
    }
}

TEST(Fit, TranslationEquivariant) {
    Rng rng(24);
    const Matrix p = random_curve(rng, 80);
    const Eigen::RowVector2d shift(3.5, -1.25);
    const DemoSet a({uniform_traj(p)});
    const DemoSet b({uniform_traj(p.rowwise() + shift)});
    const auto fa = fit(construct(a, 12, {}), a);
    const auto fb = fit(construct(b, 12, {}), b);
    EXPECT_EQ(fa.assignment.owner, fb.assignment.owner);
    EXPECT_LT(((fa.map.nodes.rowwise() + shift) - fb.map.nodes).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Reproduce, PolylineSamples) {
    const DemoSet demos({uniform_traj(segment(50))});
    const auto map = construct(demos, 5, {});
    EXPECT_EQ(reproduce(map, 5).points(), map.nodes);
    const auto two = reproduce(map, 2);
    EXPECT_EQ(two.front(), Vector(map.nodes.row(0).transpose()));
    EXPECT_EQ(two.back(), Vector(map.nodes.row(4).transpose()));
    EXPECT_THROW((void)reproduce(map, 1), Error);
}

TEST(Reproduce, StaysOnPolyline) {
    Matrix p(100, 2);
    for (int i = 0; i < 100; ++i) p.row(i) << i / 99.0, std::sin(2 * std::numbers::pi * i / 99.0);
    const DemoSet demos({uniform_traj(p)});
    const auto map = fit(construct(demos, 20, {}), demos).map;
    const auto r = reproduce(map, 101);
    for (std::size_t j = 0; j < r.size(); ++j) {
        const Eigen::RowVector2d q = r.points().row(static_cast<Eigen::Index>(j));
        double best = 1e300;
        for (Eigen::Index i = 0; i + 1 < map.nodes.rows(); ++i) {
            const Eigen::RowVector2d a = map.nodes.row(i), b = map.nodes.row(i + 1);
            const double t = std::clamp((q - a).dot(b - a) / (b - a).squaredNorm(), 0.0, 1.0);
            best = std::min(best, (q - (a + t * (b - a))).norm());
        }
        EXPECT_LT(best, 1e-14);
    }
}
