#include "support.hpp"

#include "cyberirl/irl.hpp"
#include "cyberirl/sim.hpp"

#include "doctest.h"

using namespace testing;

namespace {

TabularMdp absorbing(std::size_t actions)
{
    TabularMdp m;
    m.add_state();
    const Outcome self{0, 1.0};
    for (std::size_t a = 0; a < actions; ++a) m.add_action(std::span(&self, 1));
    m.finalize();
    return m;
}

TrajectoryRecord record(std::size_t step, StateIndex from, StateIndex to, FeatureVector f)
{
    TrajectoryRecord r;
    r.step = step;
    r.state_index = from;
    r.next_state_index = to;
    r.feature_vector = std::move(f);
    return r;
}

TrajectorySet one_trajectory_set(std::vector<TrajectoryRecord> records)
{
    TrajectorySet ts;
    ts.scenario_hash = "abc";
    Trajectory t;
    t.scenario_ref = "abc";
    t.records = std::move(records);
    ts.trajectories.push_back(std::move(t));
    return ts;
}

FeatureVector unit(std::size_t i, double v = 1.0)
{
    FeatureVector f(kNumFeatures, 0.0);
    f[i] = v;
    return f;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric)
{
    return max_abs_diff(analytic, numeric) / std::max(max_abs(numeric), 1e-8);
}

const AttackerMdp& two_host_mdp()
{
    static const AttackerMdp mdp(two_host_scenario());
    return mdp;
}

}  // namespace

TEST_CASE("empirical expectations of a single one-step trajectory")
{
    const auto ts = one_trajectory_set({record(0, 0, 1, unit(0))});
    CHECK(empirical_feature_expectations(ts, 0.9) == unit(0));
}

TEST_CASE("duplicating trajectories leaves the mean unchanged")
{
    auto ts = one_trajectory_set({record(0, 0, 1, unit(0)), record(1, 1, 2, unit(1, 3.0))});
    const auto once = empirical_feature_expectations(ts, 0.7);
    ts.trajectories.push_back(ts.trajectories[0]);
    CHECK(max_abs_diff(empirical_feature_expectations(ts, 0.7), once) < 1e-15);
}

TEST_CASE("three-record discounted sum matches hand accumulation")
{
    const std::vector<FeatureVector> f{{1, 2, 0, 0, 0.4, 1, 0}, {1, 1, 4, 0, 0.7, 1, 1}, {1, 0, 0, 8, 0.5, 2, 0}};
    const auto ts = one_trajectory_set({record(0, 0, 1, f[0]), record(1, 1, 2, f[1]), record(2, 2, 3, f[2])});
    // f0 + f1/2 + f2/4, coordinate by coordinate.
    const FeatureVector oracle{1.75, 2.5, 2.0, 2.0, 0.875, 2.0, 0.5};
    CHECK(max_abs_diff(empirical_feature_expectations(ts, 0.5), oracle) < 1e-15);
}

TEST_CASE("empirical expectations reject empty, mixed and non-stationary-only sets")
{
    CHECK_THROWS_WITH_AS(empirical_feature_expectations(TrajectorySet{}, 0.9), doctest::Contains("empty"),
                         PreconditionError);
    auto ts = one_trajectory_set({record(0, 0, 1, unit(0))});
    ts.trajectories.push_back(ts.trajectories[0]);
    ts.trajectories[1].scenario_ref = "def";
    CHECK_THROWS_AS(empirical_feature_expectations(ts, 0.9), PreconditionError);

    auto reactive = one_trajectory_set({record(0, 0, 1, unit(0))});
    reactive.trajectories[0].stationary = false;
    CHECK_THROWS_AS(empirical_feature_expectations(reactive, 0.9), PreconditionError);
    CHECK(empirical_feature_expectations(reactive, 0.9, true) == unit(0));
}

TEST_CASE("visitation base case and geometric total")
{
    const auto rm = random_mdp(21);
    const auto pi = uniform_policy(rm.mdp);
    const auto one = expected_visitation(rm.mdp, pi, 1, 0.9);
    for (std::size_t slot = 0; slot < rm.mdp.num_slots(); ++slot)
        CHECK(one[slot] == (rm.mdp.state_of(slot) == 0 ? pi.probs[slot] : 0.0));

    const auto m = absorbing(3);
    const auto mass = expected_visitation(m, uniform_policy(m), 200, 0.9);
    double total = 0.0;
    for (double x : mass) total += x;
    CHECK(std::abs(total - 10.0) < 1e-6);
    CHECK_THROWS_AS(expected_visitation(m, uniform_policy(m), 0, 0.9), PreconditionError);
}

TEST_CASE("state marginals conserve probability")
{
    const auto rm = random_mdp(22);
    for (const auto& d : state_marginals(rm.mdp, uniform_policy(rm.mdp), 50)) {
        double total = 0.0;
        for (double x : d) total += x;
        CHECK(std::abs(total - 1.0) < 1e-9);
    }
}

TEST_CASE("single-action MDP has zero log-likelihood")
{
    const auto m = absorbing(1);
    FeatureTable f(2, 1);
    f.row(0)[0] = 1.0;
    f.row(0)[1] = -2.0;
    const std::vector<SlotTrajectory> demos{{0, 0, 0}};
    for (const auto& psi : {std::vector<double>{0.0, 0.0}, std::vector<double>{3.0, 1.5}})
        CHECK(log_likelihood(m, f, psi, demos, SoftViOptions{}) == doctest::Approx(0.0));
}

TEST_CASE("uniform-Q visit contributes minus log k")
{
    const auto m = absorbing(4);
    const FeatureTable f(1, 4);
    const std::vector<SlotTrajectory> demos{{2}};
    CHECK(log_likelihood(m, f, std::vector<double>{0.7}, demos, SoftViOptions{}) ==
          doctest::Approx(-std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("log-likelihood gradient matches central differences")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto rm = random_mdp(seed * 7919);
        const auto psi = random_vector(seed, rm.features.dim());
        SoftViOptions o;
        o.gamma = 0.9;
        o.temperature = 0.8;
        o.tol = 1e-13;
        const auto demos = sample_slots(rm.mdp, uniform_policy(rm.mdp), 10, 15, seed);
        const auto g = log_likelihood_gradient(rm.mdp, rm.features, psi, demos, o);
        std::vector<double> fd(psi.size());
        const double h = 1e-5;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            auto up = psi, down = psi;
            up[i] += h;
            down[i] -= h;
            fd[i] = (log_likelihood(rm.mdp, rm.features, up, demos, o) -
                     log_likelihood(rm.mdp, rm.features, down, demos, o)) /
                    (2 * h);
        }
        CHECK(relative_error(g, fd) < 1e-4);
    }
}

TEST_CASE("maximum-entropy objective gradient matches central differences")
{
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto rm = random_mdp(seed * 104729);
        const auto psi = random_vector(seed + 50, rm.features.dim());
        const auto empirical = random_vector(seed + 60, rm.features.dim(), 3.0);
        IrlConfig cfg;
        cfg.gamma = 0.9;
        cfg.horizon = 400;
        cfg.solver_tol = 1e-13;
        cfg.l2_reg = 0.01;
        const auto obj = maxent_objective(rm.mdp, rm.features, psi, empirical, cfg);
        std::vector<double> fd(psi.size());
        const double h = 1e-5;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            auto up = psi, down = psi;
            up[i] += h;
            down[i] -= h;
            fd[i] = (maxent_objective(rm.mdp, rm.features, up, empirical, cfg).value -
                     maxent_objective(rm.mdp, rm.features, down, empirical, cfg).value) /
                    (2 * h);
        }
        CHECK(relative_error(obj.gradient, fd) < 1e-4);
    }
}

TEST_CASE("fitting uniform-policy data recovers a near-uniform policy")
{
    // Equal action counts make psi = 0 the uniform policy; the long horizon makes the gradient exact.
    SplitMix64 rng(31);
    TabularMdp m;
    for (std::uint32_t s = 0; s < 8; ++s) {
        m.add_state();
        for (int a = 0; a < 3; ++a) {
            const double p = 0.1 + 0.8 * rng.uniform();
            const std::vector<Outcome> outs{{static_cast<std::uint32_t>(rng.uniform() * 8), p},
                                            {static_cast<std::uint32_t>(rng.uniform() * 8), 1.0 - p}};
            m.add_action(outs);
        }
    }
    m.finalize();
    FeatureTable f(3, m.num_slots());
    for (std::size_t slot = 0; slot < m.num_slots(); ++slot)
        for (double& x : f.row(slot)) x = 2.0 * rng.uniform() - 1.0;

    const auto uniform = uniform_policy(m);
    const std::size_t length = 200;
    const auto demos = sample_slots(m, uniform, 4000, length, 77);
    IrlConfig cfg;
    cfg.gamma = 0.9;
    cfg.horizon = length;
    cfg.l2_reg = 0.0;
    cfg.learning_rate = 0.2;
    cfg.max_epochs = 5000;
    const auto empirical = empirical_feature_expectations(f, demos, cfg.gamma);
    const auto res = irl_fit(m, f, empirical, cfg);
    CHECK(res.converged);
    CHECK(max_abs_diff(res.model, empirical) < cfg.grad_tol);

    const auto fitted = soft_policy(m, f, res.psi_hat.psi, solver(cfg.gamma, cfg.temperature));
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        double tv = 0.0;
        for (std::size_t a = m.slot_begin(s); a < m.slot_end(s); ++a) tv += std::abs(fitted.probs[a] - uniform.probs[a]);
        CHECK(0.5 * tv <= 0.05);
    }
    for (std::size_t k = 1; k < res.log_likelihood_curve.size(); ++k)
        CHECK(res.log_likelihood_curve[k] >= res.log_likelihood_curve[k - 1] - 1e-9);
}

TEST_CASE("an oversized learning rate is reported as divergence")
{
    const auto rm = random_mdp(41, 12, 4, 3);
    const auto demos = sample_slots(rm.mdp, uniform_policy(rm.mdp), 200, 20, 5);
    IrlConfig cfg;
    cfg.gamma = 0.9;
    cfg.horizon = 20;
    cfg.learning_rate = 50.0;
    cfg.max_epochs = 200;
    const auto empirical = empirical_feature_expectations(rm.features, demos, cfg.gamma);
    CHECK_THROWS_WITH_AS(irl_fit(rm.mdp, rm.features, empirical, cfg), doctest::Contains("learning_rate"),
                         DivergenceError);
}

TEST_CASE("fitting an empty trajectory set is a precondition error")
{
    TrajectorySet empty;
    empty.scenario_hash = two_host_mdp().scenario_hash();
    CHECK_THROWS_WITH_AS(irl_fit(two_host_mdp(), empty, IrlConfig{}), doctest::Contains("empty trajectory set"),
                         PreconditionError);
}

TEST_CASE("invalid configurations name the field")
{
    IrlConfig cfg;
    cfg.learning_rate = 0.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("learning_rate"), PreconditionError);
    cfg = {};
    cfg.gamma = 1.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("gamma"), PreconditionError);
}

TEST_CASE("the generating reward explains its own data better than the zero reward")
{
    const AttackerMdp mdp(load_scenario_file(data_path("six_host.scn")));
    const auto ps = load_psi_star();
    const auto pi = soft_policy(mdp.tabular(), mdp.features(), ps.psi.psi, solver(ps.gamma, ps.temperature));
    const auto b = run_batch(mdp, pi, 1000, 500, 60);
    const RewardParams zero{std::vector<double>(kNumFeatures, 0.0)};
    CHECK(log_likelihood(mdp, ps.psi, b.set, ps.gamma, ps.temperature) >
          log_likelihood(mdp, zero, b.set, ps.gamma, ps.temperature));

    const auto demos = to_slot_trajectories(mdp, b.set);
    REQUIRE(demos.size() == 1000);
    for (std::size_t i = 0; i < demos.size(); ++i) {
        const auto& recs = b.set.trajectories[i].records;
        REQUIRE(demos[i].size() == recs.size());
        for (std::size_t k = 0; k < recs.size(); ++k) {
            CHECK(mdp.action(demos[i][k]) == recs[k].action);
            CHECK(mdp.state_index(mdp.tabular().state_of(demos[i][k])) == recs[k].state_index);
        }
    }
    const auto states = visited_states(mdp.tabular(), demos);
    CHECK(std::is_sorted(states.begin(), states.end()));
    CHECK(policy_agreement(mdp.tabular(), pi, pi, states) == doctest::Approx(1.0));
}

TEST_CASE("expected value difference is zero for the true reward and its positive multiples")
{
    const auto& mdp = two_host_mdp();
    const auto ps = load_psi_star();
    CHECK(std::abs(evd(mdp, ps.psi, ps.psi, 0.95)) < 1e-9);
    RewardParams scaled = ps.psi;
    for (double& x : scaled.psi) x *= 2.5;
    CHECK(std::abs(evd(mdp, ps.psi, scaled, 0.95)) < 1e-6);

    RewardParams flipped = ps.psi;
    for (double& x : flipped.psi) x = -x;
    CHECK(evd(mdp, ps.psi, flipped, 0.95) > 0.0);
    CHECK(optimal_value(mdp, ps.psi, 0.95) > 0.0);
}

TEST_CASE("counterfactual evaluation is consistent with policy evaluation")
{
    const auto& mdp = two_host_mdp();
    const auto ps = load_psi_star();
    const auto pi = soft_policy(mdp.tabular(), mdp.features(), ps.psi.psi, solver(0.95, ps.temperature));
    const auto r = mdp.features(FeatureMode::ground_truth).rewards(ps.psi.psi);
    const auto direct = evaluate_policy(mdp.tabular(), r, pi, 0.95, 1e-12);
    CHECK(counterfactual_evaluate(mdp, ps.psi, pi, 0.95) == doctest::Approx(direct.V[0]).epsilon(1e-8));

    Policy idle;
    idle.probs.assign(mdp.num_slots(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) idle.probs[mdp.tabular().slot_begin(s)] = 1.0;
    CHECK(counterfactual_evaluate(mdp, ps.psi, idle, 0.95) < 0.0);
    CHECK(counterfactual_evaluate(mdp, ps.psi, idle, 0.95) == doctest::Approx(-0.1 / 0.05));
}
