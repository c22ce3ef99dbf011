#include "support.hpp"

#include "cyberirl/irl.hpp"
#include "cyberirl/profiler.hpp"
#include "cyberirl/sim.hpp"

#include "doctest.h"

#include <cstdlib>

using namespace testing;

namespace {

Trajectory chain(std::size_t n, ActionKind kind = ActionKind::vuln_search, const std::string& host = "h1")
{
    Trajectory t;
    t.scenario_ref = "abc";
    for (std::size_t i = 0; i < n; ++i) {
        TrajectoryRecord r;
        r.step = i;
        r.state_index = i;
        r.next_state_index = i + 1;
        r.action = {kind, host};
        r.feature_vector.assign(kNumFeatures, 0.0);
        t.records.push_back(std::move(r));
    }
    return t;
}

Alert alert(std::size_t step, Severity sev, AlertSource src = AlertSource::ids)
{
    return {step, src, sev, "h1", ActionKind::vuln_search};
}

const AttackerMdp& six_host_mdp()
{
    static const AttackerMdp mdp(load_scenario_file(data_path("six_host.scn")));
    return mdp;
}

}  // namespace

TEST_CASE("a trajectory without alerts is perfectly stealthy")
{
    const auto m = compute_metrics(chain(5));
    CHECK(m.stealth == 1.0);
    CHECK(m.alert_count == 0);
    CHECK_FALSE(m.time_to_first_alert.has_value());
}

TEST_CASE("single-record duration is that record's wall time")
{
    auto t = chain(1);
    t.records[0].wall_time_units = 2.5;
    CHECK(compute_metrics(t).attack_duration == 2.5);
}

TEST_CASE("two medium alerts over ten records")
{
    auto t = chain(10);
    t.records[3].alerts.push_back(alert(3, Severity::medium));
    t.records[7].alerts.push_back(alert(7, Severity::medium));
    const auto m = compute_metrics(t);
    CHECK(m.stealth == doctest::Approx(1.0 - 4.0 / 10.0));
    CHECK(m.weighted_alerts == 4.0);
    CHECK(m.severity_histogram[1] == 2);
    CHECK(m.time_to_first_alert == std::optional<double>(4.0));
    CHECK(m.target_interactions.at("h1").count == 10);
    CHECK(m.target_interactions.at("h1").max_level == KnowledgeLevel::scanned);
}

TEST_CASE("stealth saturates at zero")
{
    auto t = chain(2);
    for (auto& r : t.records) r.alerts.push_back(alert(r.step, Severity::high));
    CHECK(compute_metrics(t).stealth == 0.0);
}

TEST_CASE("empty or unchained trajectories are rejected")
{
    CHECK_THROWS_AS(compute_metrics(Trajectory{}), PreconditionError);
    auto t = chain(4);
    t.records[2].state_index = 99;
    CHECK_THROWS_WITH_AS(compute_metrics(t), doctest::Contains("step 2"), PreconditionError);
    CHECK_THROWS_AS(infer_profile(TrajectorySet{}, two_host_scenario()), PreconditionError);
}

TEST_CASE("a fixed-interval actor looks scripted and the unknowables stay unknown")
{
    TrajectorySet ts;
    ts.trajectories.push_back(chain(12, ActionKind::active_recon));
    const auto p = infer_profile(ts, two_host_scenario());
    CHECK(p.sentience == Sentience::likely_scripted);
    CHECK(p.timing_cv == 0.0);
    CHECK(p.emotional_state == "not_inferable");
    CHECK(p.num_attackers == "not_inferable");
}

TEST_CASE("irregular pacing looks human and too few actions stay unknown")
{
    auto t = chain(10, ActionKind::active_recon);
    for (std::size_t i = 0; i < t.records.size(); ++i) t.records[i].wall_time_units = 1.0 + static_cast<double>(i % 3);
    TrajectorySet ts;
    ts.trajectories.push_back(t);
    CHECK(infer_profile(ts, two_host_scenario()).sentience == Sentience::likely_human);

    TrajectorySet short_set;
    short_set.trajectories.push_back(chain(2, ActionKind::active_recon));
    CHECK(infer_profile(short_set, two_host_scenario()).sentience == Sentience::unknown);
}

TEST_CASE("without decoys deception awareness is false and low-confidence")
{
    TrajectorySet ts;
    ts.trajectories.push_back(chain(8));
    const auto p = infer_profile(ts, two_host_scenario());
    CHECK_FALSE(p.deception_aware);
    CHECK(p.deception_aware_low_confidence);
}

TEST_CASE("decoy avoidance after first contact reads as deception-aware")
{
    const auto s = load_scenario_file(data_path("six_host.scn"));
    auto t = chain(10, ActionKind::active_recon, "hr_db");
    for (std::size_t i = 0; i < 4; ++i) t.records[i].alerts.push_back({i, AlertSource::decoy, Severity::medium, "hr_db",
                                                                        ActionKind::active_recon});
    for (std::size_t i = 4; i < 10; ++i) t.records[i].action.host = "web01";
    TrajectorySet ts;
    ts.trajectories.push_back(t);
    const auto p = infer_profile(ts, s);
    CHECK(p.deception_aware);
    CHECK_FALSE(p.deception_aware_low_confidence);
    CHECK(std::find(p.strategy_tags.begin(), p.strategy_tags.end(), "decoy-engaged") != p.strategy_tags.end());
}

TEST_CASE("a greedy scripted attacker on the shipped fixture is classified as scripted")
{
    const auto& mdp = six_host_mdp();
    const auto ps = load_psi_star();
    const auto pi = optimal_policy(mdp.tabular(), mdp.features(), ps.psi.psi, solver(ps.gamma, ps.temperature));
    const auto b = run_batch(mdp, pi, 20, 1, 60);
    CHECK(infer_profile(b.set, mdp.scenario()).sentience == Sentience::likely_scripted);
}

TEST_CASE("profile report matches the golden file and re-runs are identical")
{
    const auto text = six_host_profile_text(six_host_mdp());
    CHECK(six_host_profile_text(six_host_mdp()) == text);

    const auto path = golden_path("profile_six_host.json");
    if (std::getenv("CYBERIRL_UPDATE_GOLDEN")) std::ofstream(path, std::ios::binary) << text;
    const auto golden = read_file(path);
    REQUIRE_FALSE(golden.empty());
    CHECK(golden == text);
}
