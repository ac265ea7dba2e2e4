#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mtlspca/errors.hpp"
#include "mtlspca/estimator.hpp"
#include "mtlspca/harness.hpp"
#include "mtlspca/theory.hpp"

using namespace mtlspca;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ExperimentReport sample_report() {
    ExperimentReport r;
    r.experiment = "demo";
    r.sweep_variable = "p";
    r.metadata = {{"seed", "3"}, {"note", "two methods"}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.rows = {{100, "pca", 0.18286, 0.181, 0.004, 0.25}, {200, "pca", 0.2, nan, nan, 0.0},
              {100, "spca", 0.17, 0.1712, 0.0031, 1.0 / 3.0}};
    return r;
}

}  // namespace

TEST_CASE("reports round-trip") {
    const ExperimentReport r = sample_report();
    std::stringstream buf;
    write_report(r, buf);
    CHECK(buf.str().find("sweep_value,method,theory_error,empirical_error,stderr,seconds") != std::string::npos);
    const ExperimentReport back = parse_report(buf, "mem");
    CHECK(back.experiment == r.experiment);
    CHECK(back.sweep_variable == r.sweep_variable);
    CHECK(back.metadata == r.metadata);
    REQUIRE(back.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(back.rows[i].method == r.rows[i].method);
        CHECK(back.rows[i].theory_error == r.rows[i].theory_error);
        CHECK(back.rows[i].seconds == r.rows[i].seconds);
        CHECK(std::isnan(back.rows[i].empirical_error) == std::isnan(r.rows[i].empirical_error));
    }
    CHECK(back.methods() == std::vector<std::string>{"pca", "spca"});
    CHECK(back.curve("pca").size() == 2);
    CHECK(back.at("spca", 100).empirical_error == doctest::Approx(0.1712));
    CHECK(back.meta("seed") == "3");
    CHECK(back.meta("missing").empty());
    CHECK_NOTHROW(back.validate());
}

TEST_CASE("report validation") {
    ExperimentReport r = sample_report();
    r.rows[0].empirical_error = 1.5;
    CHECK_THROWS_AS(r.validate(), InputError);
    r = sample_report();
    r.rows[1].sweep_value = 100;
    CHECK_THROWS_AS(r.validate(), InputError);
    std::stringstream bad("# experiment: x\nsweep_value,method\n");
    CHECK_THROWS_AS(parse_report(bad, "mem"), ParseError);
}

TEST_CASE("transfer mixtures") {
    const MixtureSpec b = binary_transfer_mixture(10, {5, 7}, {1.0, 0.6});
    CHECK(b.layout.counts() == std::vector<int>{5, 5, 7, 7});
    CHECK(b.means.col(0) == -b.means.col(1));
    CHECK(b.means(0, 3) == doctest::Approx(0.6));
    CHECK(b.means(9, 3) == doctest::Approx(0.8));
    const MixtureSpec m = multiclass_transfer_mixture(20, 3, {4, 4}, {0.5, 1.0});
    CHECK(m.layout.groups() == 6);
    CHECK(m.means.col(1).norm() == doctest::Approx(2.0));
    CHECK(m.means(1, 1) == doctest::Approx(1.0));
    CHECK_THROWS_AS(binary_transfer_mixture(10, {5}, {1.0, 0.5}), InputError);
}

TEST_CASE("fig1 report: theory is seed independent and runs are reproducible") {
    Fig1Config cfg;
    cfg.dimensions = {100, 300};
    cfg.per_class = 200;
    cfg.test_samples = 200;
    cfg.seeds = 2;
    cfg.seed = 4;
    const ExperimentReport a = run_fig1(cfg);
    const ExperimentReport b = run_fig1(cfg);
    cfg.seed = 5;
    const ExperimentReport c = run_fig1(cfg);
    CHECK_NOTHROW(a.validate());
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].empirical_error == b.rows[i].empirical_error);
        CHECK(a.rows[i].theory_error == c.rows[i].theory_error);
    }
    CHECK(a.methods() == std::vector<std::string>{"pca", "spca"});
    CHECK_FALSE(a.meta("config_hash").empty());
}

TEST_CASE("fig2 theory columns") {
    Fig2Config cfg;
    cfg.betas = {0.0, 4.0 / 9.0, 1.0};
    cfg.seeds = 1;
    cfg.test_samples = 200;
    const ExperimentReport r = run_fig2(cfg);
    CHECK(std::abs(r.at("mtl-spca", 0.0).theory_error - 0.23975) < 5e-4);
    CHECK(std::abs(r.at("mtl-spca", 4.0 / 9.0).theory_error - 0.22877) < 5e-4);
    CHECK(std::abs(r.at("mtl-spca", 1.0).theory_error - 0.16428) < 5e-4);
    CHECK(std::abs(r.at("n-spca", 0.0).theory_error - 0.48059) < 5e-4);
    for (const ReportRow& row : r.curve("mtl-spca"))
        CHECK(row.theory_error <= r.at("st-spca", row.sweep_value).theory_error + 1e-12);
}

TEST_CASE("scaling exponent of a pure power law") {
    ExperimentReport r;
    r.experiment = "runtime";
    r.sweep_variable = "p";
    for (double p : {128.0, 256.0, 512.0, 1024.0}) r.rows.push_back({p, "m", 0.0, 0.0, 0.0, 3e-9 * p * p});
    CHECK(scaling_exponent(r, "m", 256.0) == doctest::Approx(2.0));
}

TEST_CASE("config hash") {
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("oracle matches the binary score law") {
    const MixtureSpec spec = binary_transfer_mixture(100, {500}, {1.0});
    const VectorXd y{{1.0, -1.0}};
    OracleConfig cfg;
    cfg.trainings = 50;
    cfg.draws = 10000;
    cfg.seed = 9;
    const EmpiricalScoreLaw emp = monte_carlo_oracle(spec, y, cfg);
    const SufficientStats pop = population_stats(spec);
    const VectorXd theory = binary_score_means(pop.calM, pop.proportions, pop.c0, y);
    CHECK(emp.draws >= 10000);
    for (int g = 0; g < 2; ++g) {
        CHECK(std::abs(emp.mean(g, 0) - theory(g)) < 4.0 / 100.0 + 0.02);
        CHECK(emp.variance(g, 0) > 0.9);
        CHECK(emp.variance(g, 0) < 1.1);
    }
    cfg.draws = 10;
    CHECK_THROWS_AS(monte_carlo_oracle(spec, y, cfg), InputError);
}
