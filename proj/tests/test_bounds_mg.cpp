#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "paoi/bounds_mg.hpp"
#include "paoi/errors.hpp"
#include "paoi/exact_mm.hpp"
#include "paoi/sim.hpp"

using namespace paoi;
using namespace paoi::bounds_mg;

namespace {

SystemSpec common(const ServiceDistribution& svc, const std::vector<double>& lambda) {
    std::vector<ClassSpec> cls;
    for (double l : lambda) cls.push_back({l, svc});
    return SystemSpec(std::move(cls));
}

std::size_t state_pos(const DepartureChain& chain, std::uint32_t pattern) {
    for (std::size_t i = 0; i < chain.states.size(); ++i)
        if (chain.states[i] == pattern) return i;
    FAIL("pattern not found");
    return 0;
}

}  // namespace

TEST_CASE("k=2 departure chain entries") {
    const double mu = 1.7, l1 = 0.4, l2 = 0.9;
    const auto svc = ServiceDistribution::exponential(mu);
    const auto chain = build_departure_chain(common(svc, {l1, l2}), 2);
    const Eigen::MatrixXd p(chain.transition);
    const auto s00 = state_pos(chain, 0), s01 = state_pos(chain, 2), s10 = state_pos(chain, 1),
               s11 = state_pos(chain, 3);
    CHECK(chain.states == std::vector<std::uint32_t>{0, 2, 1, 3});
    // From empty buffers the next departure leaves them empty iff no arrival
    // at all during the service (after the idle period and first arrival).
    CHECK(p(s00, s00) == doctest::Approx(mu / (mu + l1 + l2)).epsilon(1e-12));
    // Both full: class 1 is served, buffer 2 stays full.
    const double b0 = lst(svc, l1);
    CHECK(p(s11, s01) == doctest::Approx(b0).epsilon(1e-12));
    CHECK(p(s11, s11) == doctest::Approx(1.0 - b0).epsilon(1e-12));
    CHECK(p(s11, s00) == 0.0);
    CHECK(p(s11, s10) == 0.0);
    for (int r = 0; r < p.rows(); ++r) CHECK(p.row(r).sum() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("vanishing class 2 reduces the chain to the one-class chain") {
    const auto svc = ServiceDistribution::uniform(0.0, 2.0);
    const auto chain2 = build_departure_chain(common(svc, {0.8, 1e-13}), 2);
    const auto chain1 = build_departure_chain(common(svc, {0.8}), 1);
    const Eigen::MatrixXd p2(chain2.transition), p1(chain1.transition);
    // Marginal on B1 from states with B2 empty.
    const auto s00 = state_pos(chain2, 0), s10 = state_pos(chain2, 1);
    CHECK(p2(s00, s00) == doctest::Approx(p1(0, 0)).epsilon(1e-9));
    CHECK(p2(s00, s10) == doctest::Approx(p1(0, 1)).epsilon(1e-9));
    CHECK(p2(s10, s00) == doctest::Approx(p1(1, 0)).epsilon(1e-9));
    CHECK(p2(s10, s10) == doctest::Approx(p1(1, 1)).epsilon(1e-9));
    CHECK(p1(1, 0) == doctest::Approx(lst(svc, 0.8)).epsilon(1e-14));
}

TEST_CASE("zero-state probabilities") {
    const auto e1 = ServiceDistribution::exponential(1.0);
    CHECK(zero_state_prob(build_departure_chain(common(e1, {1.0}), 1)) == doctest::Approx(0.5).epsilon(1e-12));

    for (const auto& svc : {e1, ServiceDistribution::gamma(10.0, 1.0), ServiceDistribution::deterministic(0.7)}) {
        for (auto [l1, l2] : {std::pair{1.0, 1.0}, std::pair{0.02, 0.3}, std::pair{0.5, 0.05}}) {
            const double closed = lst(svc, l1 + l2) * lst(svc, l1) / (1.0 - lst(svc, l2) + lst(svc, l1 + l2));
            CHECK(zero_state_prob(build_departure_chain(common(svc, {l1, l2}), 2)) ==
                  doctest::Approx(closed).epsilon(1e-12));
        }
        CHECK(zero_state_prob(build_departure_chain(common(svc, {1e-7, 1e-7, 1e-7}), 3)) > 1.0 - 1e-5);
    }
}

TEST_CASE("one-class rejection probability") {
    for (const auto& svc : {ServiceDistribution::exponential(1.0), ServiceDistribution::uniform(0.0, 20.0),
                            ServiceDistribution::gamma(10.0, 1.0)}) {
        for (double l : {0.01, 0.1, 1.0}) {
            const double ref = 1.0 - 1.0 / (l * mean(svc) + lst(svc, l));
            CHECK(rejection_probs(common(svc, {l})).p[0] == doctest::Approx(ref).epsilon(1e-12));
        }
    }
    CHECK(rejection_probs(common(ServiceDistribution::exponential(1.0), {1.0})).p[0] ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("higher priority is rejected less") {
    for (const auto& svc : {ServiceDistribution::exponential(1.0), ServiceDistribution::gamma(10.0, 1.0)}) {
        const auto p = rejection_probs(common(svc, {0.05, 0.05})).p;
        CHECK(p[0] < p[1]);
    }
}

TEST_CASE("rejection probabilities equal the CTMC buffer-full probabilities") {
    std::mt19937_64 gen(17);
    std::uniform_real_distribution<double> u(0.02, 2.0);
    for (int t = 0; t < 50; ++t) {
        const int k = 1 + t % 4;
        const auto svc = ServiceDistribution::exponential(u(gen));
        std::vector<double> lambda(k);
        for (auto& l : lambda) l = u(gen);
        const auto spec = common(svc, lambda);
        const auto p = rejection_probs(spec).p;
        const auto pi = exact_mm::stationary(exact_mm::build_rate_matrix(spec));
        for (int i = 0; i < k; ++i)
            CHECK(p[i] == doctest::Approx(exact_mm::buffer_full_prob(spec, pi, i)).epsilon(1e-9));
    }
}

TEST_CASE("Jensen bound values") {
    CHECK(jensen_bound(1.0, 1.0, 0.0).total == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(jensen_bound(0.4, 0.25, 0.0).total == doctest::Approx(0.4 + 4.0).epsilon(1e-15));
    const auto b = jensen_bound(1.0, 1.0, 1.0 / 3.0);
    CHECK(b.total == doctest::Approx(3.5 - std::exp(-0.5)).epsilon(1e-14));
    CHECK(b.total == doctest::Approx(2.8935).epsilon(1e-4));
    CHECK_THROWS_AS(jensen_bound(1.0, 1.0, 1.0), NumericalError);

    const auto spec = common(ServiceDistribution::exponential(1.0), {1.0});
    CHECK(paoi_upper_bound(spec, rejection_probs(spec))[0].total == doctest::Approx(b.total).epsilon(1e-12));
}

TEST_CASE("bound is at least the exact PAoI for exponential service") {
    std::mt19937_64 gen(23);
    std::uniform_real_distribution<double> u(0.02, 2.0);
    for (int t = 0; t < 30; ++t) {
        const int k = 1 + t % 2;
        const auto svc = ServiceDistribution::exponential(u(gen));
        std::vector<double> lambda(k);
        for (auto& l : lambda) l = u(gen);
        const auto spec = common(svc, lambda);
        const auto bound = paoi_upper_bound(spec, rejection_probs(spec));
        for (int i = 0; i < k; ++i) CHECK(bound[i].total >= exact_mm::paoi_exact(spec, i).total - 1e-12);
    }
}

TEST_CASE("limit behaviour") {
    const auto svc = ServiceDistribution::exponential(1.0);
    const auto spec = common(svc, {0.5, 0.5});
    const auto up1 = limit_diagnostics(spec, 0, {0.0, 1.0, 2.0, 3.0});
    CHECK(up1.sup[1] >= 2.0 * up1.bounds[0][1]);
    CHECK(up1.strictly_increasing[1]);

    // Class 2 already busy at the base point; class 1 then barely moves.
    const auto up2 = limit_diagnostics(common(svc, {0.5, 10.0}), 1, {0.0, 1.0, 2.0, 3.0});
    CHECK(up2.relative_variation[0] < 0.01);

    const auto single = limit_diagnostics(common(svc, {0.5}), 0, {0.0, 1.0, 2.0, 3.0});
    CHECK(std::isfinite(single.sup[0]));
}

TEST_CASE("heterogeneous service is unsupported") {
    const SystemSpec spec({{0.1, ServiceDistribution::exponential(1.0)}, {0.1, ServiceDistribution::exponential(2.0)}});
    CHECK_THROWS_AS(rejection_probs(spec), UnsupportedModelError);
    CHECK_THROWS_AS(build_departure_chain(spec, 2), UnsupportedModelError);
}

TEST_CASE("bound dominates simulation") {
    const std::vector<SystemSpec> specs{
        common(ServiceDistribution::uniform(0.0, 20.0), {0.05, 1.0 / 30, 1.0 / 30}),
        common(ServiceDistribution::gamma(10.0, 1.0), {0.05, 1.0 / 30, 1.0 / 30}),
        common(ServiceDistribution::deterministic(1.0), {0.7, 0.4}),
        common(ServiceDistribution::exponential(0.1), {0.02, 0.1}),
    };
    sim::SimConfig cfg;
    cfg.seed = 77;
    cfg.completions_per_replication = 50000;
    for (const auto& spec : specs) {
        const auto bound = paoi_upper_bound(spec, rejection_probs(spec));
        const auto est = sim::simulate(spec, sim::Discipline::Buffer1Replace, cfg);
        for (std::size_t i = 0; i < spec.size(); ++i) {
            CAPTURE(i);
            CHECK(bound[i].total >= est.classes[i].paoi_mean - est.classes[i].ci_halfwidth);
            // The rejection probabilities are exact: PASTA against occupancy.
            CHECK(std::abs(rejection_probs(spec).p[i] - est.classes[i].buffer_full_fraction) <=
                  est.classes[i].occupancy_halfwidth);
        }
    }
}

TEST_CASE("heavy deterministic traffic approaches the capped bound") {
    const auto spec = common(ServiceDistribution::deterministic(1.0), {1000.0});
    sim::SimConfig cfg;
    cfg.replications = 5;
    cfg.completions_per_replication = 20000;
    const auto est = sim::simulate(spec, sim::Discipline::Buffer1Replace, cfg);
    const auto report = limit_diagnostics(spec, 0, {0.0});
    CHECK(est.classes[0].paoi_mean == doctest::Approx(report.bounds[0][0]).epsilon(0.01));
}
