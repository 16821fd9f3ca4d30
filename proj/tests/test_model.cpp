#include "doctest.h"

#include "dsparse/model.hpp"

#include <cmath>
#include <set>
#include <sstream>

using namespace dsparse;

namespace {

VectorXd reference_theta()
{
    VectorXd t(5);
    t << 0.8, 1.6, 0.0, 0.0, 0.0;
    return t;
}

std::vector<RegressorGenerator> single_coordinate_generators(std::size_t n, std::size_t m)
{
    std::vector<RegressorGenerator> gens;
    for (std::size_t i = 0; i < n; ++i) gens.emplace_back(single_coordinate_regressor(i, m, 1.1, 0.2));
    return gens;
}

} // namespace

TEST_CASE("true parameter zero set")
{
    const TrueParameter theta(reference_theta());
    CHECK(theta.d == 2);
    CHECK(theta.zero_set == std::vector<std::size_t>{2, 3, 4});
    CHECK(theta.d + theta.zero_set.size() == theta.dim());
}

TEST_CASE("step_regressor: zero dynamics give a zero regressor")
{
    StateSpaceRegressor r{MatrixXd::Zero(3, 3), VectorXd::Zero(3), MatrixXd::Identity(3, 3), VectorXd::Ones(3), 0.5};
    Substream rng(1);
    CHECK(step_regressor(r, rng).isZero(0.0));
}

TEST_CASE("step_regressor: noiseless growth is geometric")
{
    StateSpaceRegressor r{1.1 * MatrixXd::Identity(4, 4), VectorXd::Ones(4), MatrixXd::Identity(4, 4), VectorXd::Ones(4), 0.0};
    Substream rng(1);
    VectorXd phi;
    for (int k = 1; k <= 30; ++k) {
        phi = step_regressor(r, rng);
        const double expected = std::pow(1.1, k);
        CHECK((phi.array() - expected).abs().maxCoeff() <= 1e-12 * expected);
    }
}

TEST_CASE("single-coordinate regressors excite one coordinate each, jointly all")
{
    const std::size_t n = 6, m = 5;
    auto gens = single_coordinate_generators(n, m);
    std::set<std::size_t> covered;
    for (std::size_t i = 0; i < n; ++i) {
        Substream rng(42, i, Purpose::regressor);
        std::set<std::size_t> excited;
        for (int t = 0; t < 50; ++t) {
            const auto phi = step_regressor(gens[i], rng);
            int nonzero = 0;
            for (Eigen::Index l = 0; l < phi.size(); ++l) {
                if (phi(l) != 0.0) {
                    ++nonzero;
                    excited.insert(static_cast<std::size_t>(l));
                }
            }
            CHECK(nonzero == 1);
        }
        REQUIRE(excited.size() == 1);
        // sensor i (1-based) -> coordinate ((i - 1) mod m) + 1
        CHECK(*excited.begin() == i % m);
        covered.insert(*excited.begin());
    }
    CHECK(covered.size() == m);
}

TEST_CASE("observe without noise")
{
    const TrueParameter theta(reference_theta());
    const NoiseModel silent{NoiseKind::gaussian, 0.0};
    Substream rng(3);
    CHECK(observe(theta, VectorXd::Unit(5, 1), silent, rng) == 1.6);
    CHECK(observe(theta, VectorXd::Zero(5), silent, rng) == 0.0);
    CHECK_THROWS_AS(observe(theta, VectorXd::Zero(4), silent, rng), ConfigError);
}

TEST_CASE("observation noise moments")
{
    const TrueParameter theta(reference_theta());
    const VectorXd phi = VectorXd::Unit(5, 0);
    for (auto kind : {NoiseKind::gaussian, NoiseKind::uniform}) {
        const NoiseModel noise{kind, 0.1};
        Substream rng(2024, 0, Purpose::observation);
        const int draws = 100000;
        double sum = 0.0, sq = 0.0;
        for (int k = 0; k < draws; ++k) {
            const double w = observe(theta, phi, noise, rng) - phi.dot(theta.theta);
            sum += w;
            sq += w * w;
        }
        const double mean = sum / draws;
        const double var = sq / draws - mean * mean;
        CHECK(std::abs(mean) <= 0.01);
        CHECK(std::abs(var - 0.1) <= 0.01);
    }
}

TEST_CASE("uniform noise is bounded")
{
    const NoiseModel noise{NoiseKind::uniform, 0.1};
    Substream rng(5);
    const double half = std::sqrt(0.3);
    for (int k = 0; k < 10000; ++k) CHECK(std::abs(noise.draw(rng)) <= half);
}

TEST_CASE("streams are deterministic in the seed")
{
    ObservationStream a(TrueParameter(reference_theta()), {}, single_coordinate_generators(6, 5), 99);
    ObservationStream b(TrueParameter(reference_theta()), {}, single_coordinate_generators(6, 5), 99);
    ObservationStream c(TrueParameter(reference_theta()), {}, single_coordinate_generators(6, 5), 100);
    bool differs = false;
    for (int t = 0; t < 50; ++t) {
        const auto ra = a.next_round();
        const auto rb = b.next_round();
        const auto rc = c.next_round();
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(ra[i].phi == rb[i].phi);
            CHECK(ra[i].y == rb[i].y);
            differs = differs || ra[i].y != rc[i].y;
        }
    }
    CHECK(differs);
}

TEST_CASE("substreams: changing one sensor's generator leaves the others alone")
{
    auto gens = single_coordinate_generators(4, 3);
    auto swapped = gens;
    swapped[2] = IidGaussianRegressor{3, 2.0};
    ObservationStream a(TrueParameter(VectorXd::Ones(3)), {}, gens, 7);
    ObservationStream b(TrueParameter(VectorXd::Ones(3)), {}, swapped, 7);
    for (int t = 0; t < 40; ++t) {
        const auto ra = a.next_round();
        const auto rb = b.next_round();
        for (std::size_t i : {0u, 1u, 3u}) {
            CHECK(ra[i].phi == rb[i].phi);
            CHECK(ra[i].y == rb[i].y);
        }
        // sensor 2's noise draw is the same even though its regressor changed
        const double wa = ra[2].y - ra[2].phi.sum();
        const double wb = rb[2].y - rb[2].phi.sum();
        CHECK(wa == doctest::Approx(wb).epsilon(1e-9));
    }
}

TEST_CASE("replay CSV round-trips through a stream")
{
    ObservationStream live(TrueParameter(reference_theta()), {}, single_coordinate_generators(6, 5), 11);
    ReplayTable table;
    table.n = 6;
    table.m = 5;
    for (int t = 0; t < 10; ++t) table.rounds.push_back(live.next_round());

    std::stringstream csv;
    write_replay_csv(csv, table);
    std::string header;
    std::getline(std::stringstream(csv.str()), header);
    CHECK(header == "t,i,phi_1,phi_2,phi_3,phi_4,phi_5,y");

    ObservationStream replayed(TrueParameter(reference_theta()), read_replay_csv(csv));
    CHECK(replayed.sensors() == 6);
    for (int t = 0; t < 10; ++t) {
        const auto r = replayed.next_round();
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(r[i].phi == table.rounds[t][i].phi);
            CHECK(r[i].y == table.rounds[t][i].y);
        }
    }
    CHECK_THROWS_AS(replayed.next_round(), ConfigError);
}

TEST_CASE("replay CSV rejects gaps")
{
    std::stringstream missing_sensor("t,i,phi_1,y\n0,1,1.0,2.0\n0,2,1.0,2.0\n1,1,1.0,2.0\n");
    CHECK_THROWS_AS(read_replay_csv(missing_sensor), ConfigError);
    std::stringstream ragged("t,i,phi_1,y\n0,1,1.0\n");
    CHECK_THROWS_AS(read_replay_csv(ragged), ConfigError);
}
