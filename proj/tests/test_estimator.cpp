#include "doctest.h"

#include "dsparse/estimator.hpp"
#include "test_util.hpp"

#include <cmath>
#include <random>

using namespace dsparse;

namespace {

std::vector<Observation> random_round(std::mt19937_64& gen, std::size_t n, Eigen::Index m,
                                      const VectorXd& theta)
{
    std::normal_distribution<double> nd;
    std::vector<Observation> obs(n);
    for (auto& o : obs) {
        o.phi = testutil::random_gaussian(gen, m, 1);
        o.y = o.phi.dot(theta) + 0.1 * nd(gen);
    }
    return obs;
}

std::vector<Observation> silent_round(std::size_t n, Eigen::Index m)
{
    return std::vector<Observation>(n, Observation{VectorXd::Zero(m), 0.0});
}

} // namespace

TEST_CASE("init_state")
{
    VectorXd theta0(2);
    theta0 << 1.0, 0.0;
    const auto net = init_state<double>(3, 2.0 * MatrixXd::Identity(2, 2), theta0);
    REQUIRE(net.size() == 3);
    CHECK(net.t == 0);
    for (const auto& s : net.sensors) {
        CHECK((s.P_inv - 0.5 * MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(s.q(0) == doctest::Approx(0.5));
        CHECK(s.q(1) == 0.0);
        CHECK(s.theta_ls == theta0);
        CHECK(s.H == std::vector<std::size_t>{1});
    }

    MatrixXd indefinite(2, 2);
    indefinite << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(init_state<double>(2, indefinite, theta0), ConfigError);
    CHECK_THROWS_AS(init_state<double>(2, MatrixXd::Identity(3, 3), theta0), ConfigError);
}

TEST_CASE("single sensor reduces to recursive ridge regression")
{
    std::mt19937_64 gen(1);
    VectorXd theta(3);
    theta << 1.0, -2.0, 0.5;
    const auto g = metropolis_weights({}, 1);
    // P0 = I / eps with eps = 1e-6: a barely regularised ridge
    auto net = init_state<double>(1, 1e6 * MatrixXd::Identity(3, 3), VectorXd::Zero(3));
    MatrixXd gram = 1e-6 * MatrixXd::Identity(3, 3);
    VectorXd rhs = VectorXd::Zero(3);
    std::normal_distribution<double> nd;
    for (int t = 0; t < 200; ++t) {
        std::vector<Observation> obs(1);
        obs[0].phi = testutil::random_gaussian(gen, 3, 1);
        obs[0].y = obs[0].phi.dot(theta) + 1e-3 * nd(gen); // noise variance 1e-6
        gram += obs[0].phi * obs[0].phi.transpose();
        rhs += obs[0].phi * obs[0].y;
        net = dls_round(net, g, obs);
    }
    const VectorXd ridge = gram.llt().solve(rhs);
    CHECK((net.sensors[0].theta_ls - ridge).norm() <= 1e-10);
    CHECK((net.sensors[0].theta_ls - theta).norm() <= 1e-3);
}

TEST_CASE("recursion matches the batch formula through adjacency powers")
{
    // P_inv_{t,i} = sum_j a^{(t)}_ij P0^{-1} + sum_{k<t} sum_j a^{(t-k)}_ij phi_{k,j} phi_{k,j}^T
    std::mt19937_64 gen(5);
    const std::size_t n = 3;
    const Eigen::Index m = 2;
    const auto g = metropolis_weights({{0, 1}, {1, 2}}, n);
    AdjacencyPowers powers(g);
    const VectorXd theta = VectorXd::Ones(m);
    auto net = init_state<double>(n, MatrixXd::Identity(m, m), VectorXd::Ones(m));

    std::vector<std::vector<Observation>> history;
    for (std::size_t t = 1; t <= 20; ++t) {
        history.push_back(random_round(gen, n, m, theta));
        net = dls_round(net, g, history.back());
        for (std::size_t i = 0; i < n; ++i) {
            MatrixXd P_inv = MatrixXd::Zero(m, m);
            VectorXd q = VectorXd::Zero(m);
            const auto& At = powers(t);
            for (std::size_t j = 0; j < n; ++j) {
                P_inv += At(i, j) * MatrixXd::Identity(m, m);
                q += At(i, j) * VectorXd::Ones(m);
            }
            for (std::size_t k = 0; k < t; ++k) {
                const auto& Ak = powers(t - k);
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& o = history[k][j];
                    P_inv += Ak(i, j) * o.phi * o.phi.transpose();
                    q += Ak(i, j) * o.phi * o.y;
                }
            }
            CHECK((net.sensors[i].P_inv - P_inv).cwiseAbs().maxCoeff() <= 1e-8);
            CHECK((net.sensors[i].theta_ls - P_inv.llt().solve(q)).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
}

TEST_CASE("rounds without excitation leave a consensus state fixed")
{
    const auto g = ring_graph(6);
    auto net = init_state<double>(6, MatrixXd::Identity(3, 3), VectorXd::Ones(3));
    for (int t = 0; t < 5; ++t) net = dls_round(net, g, silent_round(6, 3));
    for (const auto& s : net.sensors) {
        CHECK((s.P_inv - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((s.theta_ls - VectorXd::Ones(3)).cwiseAbs().maxCoeff() <= 1e-14);
    }
}

TEST_CASE("silent rounds drive sensors to consensus")
{
    std::mt19937_64 gen(8);
    const auto g = ring_graph(6);
    auto net = init_state<double>(6, MatrixXd::Identity(3, 3), VectorXd::Ones(3));
    net = dls_round(net, g, random_round(gen, 6, 3, VectorXd::Ones(3)));
    for (int t = 1; t < 50; ++t) net = dls_round(net, g, silent_round(6, 3));
    for (const auto& s : net.sensors) {
        CHECK((s.P_inv - net.sensors[0].P_inv).cwiseAbs().maxCoeff() <= 1e-6);
        CHECK((s.theta_ls - net.sensors[0].theta_ls).cwiseAbs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("alpha_schedule")
{
    MatrixXd P_inv = MatrixXd::Zero(2, 2);
    P_inv.diagonal() << 16.0, 25.0;
    CHECK(alpha_schedule(P_inv) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(alpha_schedule(16.0, 2.0, 0.5) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(alpha_schedule(16.0, 0.0, 0.75) == 0.0);
}

TEST_CASE("theta_hat")
{
    const double e4 = std::exp(4.0);
    VectorXd ls(1);
    ls << -2.0;
    const auto hat = theta_hat(ls, MatrixXd::Constant(1, 1, e4));
    CHECK(hat.bonus == doctest::Approx(2.0 / std::exp(2.0)).epsilon(1e-13));
    CHECK(hat.value(0) == doctest::Approx(-2.0 - 2.0 / std::exp(2.0)).epsilon(1e-13));
    CHECK_FALSE(hat.log_floored);

    // zero counts as positive
    VectorXd zero = VectorXd::Zero(2);
    MatrixXd P_inv = MatrixXd::Zero(2, 2);
    P_inv.diagonal() << e4, e4;
    CHECK(theta_hat(zero, P_inv).value(0) > 0.0);

    // lambda_max = 1 -> log = 0 -> floored, bonus still positive
    const auto floored = theta_hat(zero, MatrixXd::Identity(2, 2));
    CHECK(floored.log_floored);
    CHECK(floored.bonus == doctest::Approx(std::sqrt(1e-6)));
}

TEST_CASE("property: |theta_hat| is at least the bonus")
{
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 100; ++trial) {
        const MatrixXd P_inv = testutil::random_spd(gen, 4, 100.0, 0.5);
        const VectorXd ls = testutil::random_gaussian(gen, 4, 1);
        const auto hat = theta_hat(ls, P_inv);
        CHECK(hat.bonus > 0.0);
        CHECK((hat.value.cwiseAbs().array() >= hat.bonus).all());
    }
}

TEST_CASE("plain sparse objective")
{
    VectorXd beta(2);
    beta << 1.0, -1.0;
    // 2 - 0 + 1 * 2
    CHECK(plain_sparse_objective<double>(MatrixXd::Identity(2, 2), VectorXd::Zero(2), 1.0, beta) == 4.0);
    CHECK(plain_sparse_objective<double>(MatrixXd::Identity(2, 2), VectorXd::Ones(2), 0.0, beta) == 2.0);
}

TEST_CASE("sparse round with alpha = 0 reproduces least squares")
{
    std::mt19937_64 gen(17);
    const auto g = ring_graph(5);
    auto net = init_state<double>(5, MatrixXd::Identity(4, 4), VectorXd::Ones(4));
    SparseOptions<double> opts;
    opts.alpha_c = 0.0;
    for (int t = 0; t < 20; ++t) {
        net = sparse_round(net, g, random_round(gen, 5, 4, VectorXd::Ones(4)), opts);
        for (const auto& s : net.sensors) CHECK((s.xi - s.theta_ls).cwiseAbs().maxCoeff() <= 1e-8);
    }
}

TEST_CASE("sparse round on a scalar problem")
{
    // P0 = 1, theta0 = 2 and a silent round: Psi = 1, q = 2, alpha = 1,
    // log lambda_max = 0 is floored so theta_hat = 2 + sqrt(1e-6).
    const auto g = metropolis_weights({}, 1);
    auto net = init_state<double>(1, MatrixXd::Identity(1, 1), VectorXd::Constant(1, 2.0));
    net = sparse_round(net, g, silent_round(1, 1), SparseOptions<double>{});
    const double hat = 2.0 + std::sqrt(1e-6);
    CHECK(net.sensors[0].alpha == 1.0);
    CHECK(net.sensors[0].log_floored);
    CHECK(net.sensors[0].xi(0) == doctest::Approx(2.0 - 0.5 / hat).epsilon(1e-14));
}

TEST_CASE("sensor-level parallelism does not change results")
{
    std::mt19937_64 gen(23);
    const auto g = ring_graph(6);
    auto one = init_state<double>(6, MatrixXd::Identity(5, 5), VectorXd::Ones(5));
    auto many = one;
    VectorXd theta = VectorXd::Zero(5);
    theta(0) = 1.0;
    for (int t = 0; t < 30; ++t) {
        const auto obs = random_round(gen, 6, 5, theta);
        one = sparse_round(one, g, obs, SparseOptions<double>{}, 1);
        many = sparse_round(many, g, obs, SparseOptions<double>{}, 4);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(one.sensors[i].xi == many.sensors[i].xi);
            CHECK(one.sensors[i].P_inv == many.sensors[i].P_inv);
        }
    }
}

TEST_CASE("least-squares estimate solves its normal equations")
{
    std::mt19937_64 gen(29);
    const auto g = ring_graph(4);
    auto net = init_state<double>(4, MatrixXd::Identity(3, 3), VectorXd::Ones(3));
    for (int t = 0; t < 100; ++t) {
        auto obs = random_round(gen, 4, 3, VectorXd::Ones(3));
        for (auto& o : obs) {
            o.phi *= std::pow(1.05, t);
            o.y *= std::pow(1.05, t);
        }
        net = dls_round(net, g, obs);
        for (const auto& s : net.sensors) {
            CHECK((s.P_inv * s.theta_ls - s.q).norm() <= 1e-8 * s.q.norm());
        }
    }
}

TEST_CASE("singular information matrix raises NumericalError with the sensor")
{
    // zeroed information matrices cannot be factorised
    const auto g = metropolis_weights({{0, 1}}, 2);
    auto net = init_state<double>(2, MatrixXd::Identity(2, 2), VectorXd::Ones(2));
    net.sensors[1].P_inv.setZero();
    net.sensors[0].P_inv.setZero();
    try {
        (void)dls_round(net, g, silent_round(2, 2));
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.sensor() == 0);
    }
}
