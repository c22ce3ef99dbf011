#include "support.hpp"

#include "doctest.h"

#include <map>

using namespace testing;

namespace {

using KL = KnowledgeLevel;

AttackerState state_of(std::vector<KL> levels, bool admin = false, bool terminal = false)
{
    return {std::move(levels), admin, terminal};
}

double prob_of(const StateDistribution& d, StateIndex idx)
{
    double p = 0.0;
    for (const auto& o : d)
        if (o.next == idx) p += o.prob;
    return p;
}

/// One real goal host plus a low-interaction decoy "bait" advertising value 10 behind
/// falsify_response.
Scenario decoy_scenario()
{
    Scenario s = one_host_scenario();
    HostSpec bait;
    bait.host_id = "bait";
    bait.ip_address = "10.0.0.9";
    bait.value = 10.0;
    bait.services.push_back({"mysql", "5.5", 3306, VulnSpec{"CVE-2012-2122", false}, false});
    s = apply_deception(s, deception::LaunchDecoy{bait});
    return apply_deception(s, deception::FalsifyResponse{"bait"});
}

}  // namespace

TEST_CASE("state space size follows the mixed-radix formula")
{
    CHECK(StateSpace(one_host_scenario()).size() == 24);
    CHECK(enumerate_states(load_scenario_file(data_path("six_host.scn"))).size() == 186624);
}

TEST_CASE("host cap is enforced with required and allowed sizes")
{
    Scenario s = one_host_scenario();
    for (int i = 2; i <= 9; ++i) {
        HostSpec h;
        h.host_id = "h" + std::to_string(i);
        h.ip_address = "10.0.1." + std::to_string(i);
        s.hosts.push_back(h);
    }
    CHECK_THROWS_WITH_AS(StateSpace{s}, doctest::Contains("9"), CapacityError);
    CHECK_NOTHROW(StateSpace{s, 9});
}

TEST_CASE("encode and decode are inverse and index 0 is the initial state")
{
    const StateSpace space(two_host_scenario());
    CHECK(space.encode(space.initial_state()) == 0);
    for (StateIndex i = 0; i < space.size(); ++i) CHECK(space.encode(space.decode(i)) == i);
    // h1 is the least significant digit.
    CHECK(space.encode(state_of({KL::discovered, KL::unknown})) == 1);
    CHECK(space.encode(state_of({KL::unknown, KL::discovered})) == 6);
    CHECK(space.encode(state_of({KL::unknown, KL::unknown}, true)) == 36);
    CHECK(space.encode(state_of({KL::unknown, KL::unknown}, false, true)) == 72);
}

TEST_CASE("legal actions follow the kill-chain gating")
{
    const AttackerModel m(two_host_scenario());
    const auto init = legal_actions(m, m.space().initial_state());
    REQUIRE(init.size() == 2);
    CHECK(init[0].kind == ActionKind::do_nothing);
    CHECK(init[1].kind == ActionKind::passive_recon);

    const auto at_vuln = legal_actions(m, state_of({KL::vuln_known, KL::looted}));
    CHECK(m.is_legal(state_of({KL::vuln_known, KL::looted}), {ActionKind::exploit, "h1"}));
    CHECK_FALSE(m.is_legal(state_of({KL::vuln_known, KL::looted}), {ActionKind::actions_target, "h1"}));
    CHECK(std::none_of(at_vuln.begin(), at_vuln.end(),
                       [](const AttackerAction& a) { return a.kind == ActionKind::passive_recon; }));

    const auto term = legal_actions(m, state_of({KL::looted, KL::looted}, false, true));
    REQUIRE(term.size() == 1);
    CHECK(term[0].kind == ActionKind::do_nothing);
}

TEST_CASE("terminal state is absorbing")
{
    const AttackerModel m(two_host_scenario());
    const auto t = state_of({KL::foothold, KL::looted}, false, true);
    const auto d = transition(m, t, {ActionKind::do_nothing, {}});
    REQUIRE(d.size() == 1);
    CHECK(d[0].next == m.space().encode(t));
    CHECK(d[0].prob == 1.0);
}

TEST_CASE("exploit on a vulnerable real host echoes p_exploit")
{
    const AttackerModel m(one_host_scenario());
    const auto s = state_of({KL::vuln_known});
    const auto d = transition(m, s, {ActionKind::exploit, "h1"});
    CHECK(d.size() == 2);
    CHECK(prob_of(d, m.space().encode(state_of({KL::foothold}))) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(prob_of(d, m.space().encode(s)) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("passive recon over two unknown hosts matches the Bernoulli product")
{
    const AttackerModel m(two_host_scenario());
    const auto d = transition(m, m.space().initial_state(), {ActionKind::passive_recon, {}});
    const double p = 0.6;
    std::map<StateIndex, double> oracle;
    for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
            oracle[m.space().encode(state_of({a ? KL::discovered : KL::unknown, b ? KL::discovered : KL::unknown}))] +=
                (a ? p : 1 - p) * (b ? p : 1 - p);
    REQUIRE(d.size() == 4);
    for (const auto& [idx, q] : oracle) CHECK(prob_of(d, idx) == doctest::Approx(q).epsilon(1e-14));
    CHECK(prob_of(d, 0) == doctest::Approx(0.16));
    CHECK(prob_of(d, 7) == doctest::Approx(0.36));

    const auto f = features(m, m.space().initial_state(), {ActionKind::passive_recon, {}});
    CHECK(f[1] == doctest::Approx(2 * 0.6));
}

TEST_CASE("looting the goal host ends the episode")
{
    const AttackerModel m(two_host_scenario());
    const auto d = transition(m, state_of({KL::unknown, KL::foothold}), {ActionKind::actions_target, "h2"});
    REQUIRE(d.size() == 1);
    CHECK(m.space().decode(d[0].next).terminal);
    const auto side = transition(m, state_of({KL::foothold, KL::unknown}), {ActionKind::actions_target, "h1"});
    CHECK_FALSE(m.space().decode(side[0].next).terminal);
}

TEST_CASE("do_nothing features carry bias and unit time cost")
{
    const AttackerModel m(two_host_scenario());
    const FeatureVector expect{1, 0, 0, 0, 0, 1, 0};
    CHECK(features(m, m.space().initial_state(), {ActionKind::do_nothing, {}}) == expect);
    CHECK(features(m, state_of({KL::foothold, KL::scanned}, true), {ActionKind::do_nothing, {}}) == expect);
    const FeatureVector zero(kNumFeatures, 0.0);
    CHECK(features(m, state_of({KL::looted, KL::looted}, false, true), {ActionKind::do_nothing, {}}) == zero);
}

TEST_CASE("decoy exploit is priced at advertised value only in the attacker's view")
{
    const AttackerModel m(decoy_scenario());
    REQUIRE(m.space().host_ids() == std::vector<std::string>{"bait", "h1"});
    const auto s = state_of({KL::vuln_known, KL::unknown});
    const AttackerAction a{ActionKind::exploit, "bait"};
    const auto visible = features(m, s, a, FeatureMode::attacker_visible);
    const auto truth = features(m, s, a, FeatureMode::ground_truth);
    CHECK(visible[2] == doctest::Approx(10.0));
    CHECK(truth[2] == 0.0);

    const RewardParams psi{{0, 1, 0.5, 2, -3, -0.1, -0.5}};
    double oracle = 0.0;
    for (std::size_t i = 0; i < kNumFeatures; ++i) oracle += psi.psi[i] * visible[i];
    CHECK(reward(psi, visible) == doctest::Approx(oracle).epsilon(1e-15));
    // bias 0, one level gained, foothold worth 10, IDS exploit rate 0.7, unit time, no admin use
    CHECK(reward(psi, visible) == doctest::Approx(1.0 + 5.0 - 2.1 - 0.1));
}

TEST_CASE("reward is a dot product")
{
    const FeatureVector f{1, 0.5, 2, 0, 0.3, 1, 1};
    CHECK(reward(RewardParams{std::vector<double>(kNumFeatures, 0.0)}, f) == 0.0);
    for (std::size_t i = 0; i < kNumFeatures; ++i) {
        std::vector<double> e(kNumFeatures, 0.0);
        e[i] = 1.0;
        CHECK(reward(RewardParams{e}, f) == f[i]);
    }
    CHECK_THROWS_AS(reward(RewardParams{{1.0, 2.0}}, f), PreconditionError);
}

TEST_CASE("illegal actions are precondition errors")
{
    const AttackerModel m(one_host_scenario());
    CHECK_THROWS_AS(transition(m, m.space().initial_state(), {ActionKind::exploit, "h1"}), PreconditionError);
    CHECK_THROWS_AS(features(m, m.space().initial_state(), {ActionKind::exploit, "h1"}), PreconditionError);
}

TEST_CASE("low-interaction decoys without falsify_response never yield a foothold")
{
    Scenario s = one_host_scenario();
    HostSpec bait;
    bait.host_id = "bait";
    bait.ip_address = "10.0.0.9";
    bait.value = 10.0;
    bait.services.push_back({"mysql", "5.5", 3306, VulnSpec{"X", false}, false});
    const AttackerModel m(apply_deception(s, deception::LaunchDecoy{bait}));
    const auto st = state_of({KL::vuln_known, KL::unknown});
    const auto d = transition(m, st, {ActionKind::exploit, "bait"});
    CHECK(prob_of(d, m.space().encode(st)) == 1.0);
}

TEST_CASE("tcp_reset slows active recon")
{
    const auto s = apply_deception(one_host_scenario(), deception::TcpReset{"h1"});
    const AttackerModel m(s);
    const auto d = transition(m, state_of({KL::discovered}), {ActionKind::active_recon, "h1"});
    CHECK(prob_of(d, m.space().encode(state_of({KL::scanned}))) == doctest::Approx(0.3));
    CHECK(prob_of(d, m.space().encode(state_of({KL::discovered}))) == doctest::Approx(0.7));
}

TEST_CASE("traffic control changes only the time cost")
{
    const auto base = AttackerModel(one_host_scenario());
    const auto slow = AttackerModel(apply_deception(one_host_scenario(), deception::TrafficControl{"h1", 2.5}));
    const auto st = state_of({KL::vuln_known});
    const AttackerAction a{ActionKind::exploit, "h1"};
    CHECK(transition(base, st, a) == transition(slow, st, a));
    auto f = features(slow, st, a);
    CHECK(f[5] == 2.5);
    f[5] = 1.0;
    CHECK(f == features(base, st, a));
}

TEST_CASE("compiled MDP starts at the initial state and stores global indices")
{
    const AttackerMdp mdp(load_scenario_file(data_path("six_host_no_deception.scn")));
    CHECK(mdp.tabular().initial_state() == 0);
    CHECK(mdp.state_index(0) == 0);
    CHECK(mdp.local_index(0) == std::optional<std::uint32_t>(0));
    CHECK(mdp.features().num_slots() == mdp.num_slots());
    CHECK(mdp.features(FeatureMode::ground_truth).num_slots() == mdp.num_slots());
    for (std::uint32_t s = 0; s < mdp.num_states(); ++s) {
        const auto st = mdp.model().space().decode(mdp.state_index(s));
        const auto legal = mdp.model().legal_actions(st);
        REQUIRE(legal.size() == mdp.tabular().num_actions(s));
        for (std::size_t k = 0; k < legal.size(); ++k) CHECK(mdp.action(mdp.tabular().slot_begin(s) + k) == legal[k]);
    }
}
