#include "cyberirl/mdp.hpp"

#include "cyberirl/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace cyberirl {

namespace {

constexpr std::array<std::string_view, kNumKnowledgeLevels> kLevelNames = {
    "unknown", "discovered", "scanned", "vuln_known", "foothold", "looted",
};

constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "bias", "info_gain", "foothold_value", "loot_value", "alert_exposure", "time_cost", "admin_use",
};

constexpr std::size_t idx(Feature f)
{
    return static_cast<std::size_t>(f);
}

constexpr std::size_t idx(ActionKind k)
{
    return static_cast<std::size_t>(k);
}

bool at_least(KnowledgeLevel a, KnowledgeLevel b)
{
    return static_cast<int>(a) >= static_cast<int>(b);
}

}  // namespace

std::string_view to_string(KnowledgeLevel k)
{
    return kLevelNames[static_cast<std::size_t>(k)];
}

const std::array<std::string_view, kNumFeatures>& feature_names()
{
    return kFeatureNames;
}

double reward(const RewardParams& params, std::span<const double> f)
{
    if (params.psi.size() != f.size())
        throw PreconditionError("reward: psi has dimension " + std::to_string(params.psi.size()) +
                                " but the feature vector has " + std::to_string(f.size()));
    double r = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) r += params.psi[i] * f[i];
    return r;
}

// ---------------------------------------------------------------------------------------------
// StateSpace

StateSpace::StateSpace(const Scenario& scenario, std::size_t host_cap)
{
    if (scenario.hosts.size() > host_cap) {
        // 6^H * 4 overflows double precision well before it matters here.
        const double required = std::pow(6.0, static_cast<double>(scenario.hosts.size())) * 4.0;
        const double allowed = std::pow(6.0, static_cast<double>(host_cap)) * 4.0;
        throw CapacityError("state space needs " + std::to_string(scenario.hosts.size()) + " hosts (" +
                            std::to_string(static_cast<long double>(required)) + " states) but the cap is " +
                            std::to_string(host_cap) + " hosts (" +
                            std::to_string(static_cast<long double>(allowed)) + " states)");
    }
    for (const auto& h : scenario.hosts) host_ids_.push_back(h.host_id);
    std::sort(host_ids_.begin(), host_ids_.end());
    for (std::size_t i = 0; i < host_ids_.size(); ++i) radix_ *= kNumKnowledgeLevels;
}

std::optional<std::size_t> StateSpace::host_position(std::string_view host_id) const
{
    auto it = std::lower_bound(host_ids_.begin(), host_ids_.end(), host_id);
    if (it == host_ids_.end() || *it != host_id) return std::nullopt;
    return static_cast<std::size_t>(it - host_ids_.begin());
}

StateIndex StateSpace::encode(const AttackerState& s) const
{
    if (s.per_host.size() != host_ids_.size())
        throw PreconditionError("state has " + std::to_string(s.per_host.size()) + " host levels, expected " +
                                std::to_string(host_ids_.size()));
    StateIndex index = 0;
    StateIndex place = 1;
    for (auto level : s.per_host) {
        index += static_cast<StateIndex>(level) * place;
        place *= kNumKnowledgeLevels;
    }
    index += (s.admin_cred ? 1 : 0) * radix_;
    index += (s.terminal ? 2 : 0) * radix_;
    return index;
}

AttackerState StateSpace::decode(StateIndex index) const
{
    if (index >= size())
        throw PreconditionError("state index " + std::to_string(index) + " outside [0, " +
                                std::to_string(size()) + ")");
    AttackerState s;
    s.per_host.resize(host_ids_.size());
    StateIndex rest = index % radix_;
    for (auto& level : s.per_host) {
        level = static_cast<KnowledgeLevel>(rest % kNumKnowledgeLevels);
        rest /= kNumKnowledgeLevels;
    }
    const StateIndex flags = index / radix_;
    s.admin_cred = (flags & 1) != 0;
    s.terminal = (flags & 2) != 0;
    return s;
}

AttackerState StateSpace::initial_state() const
{
    return decode(0);
}

StateSpace enumerate_states(const Scenario& scenario, std::size_t host_cap)
{
    return StateSpace(scenario, host_cap);
}

// ---------------------------------------------------------------------------------------------
// AttackerModel

AttackerModel::AttackerModel(Scenario scenario, std::size_t host_cap)
    : scenario_(std::move(scenario)), space_(scenario_, host_cap)
{
    validate(scenario_);
    const auto& ids = space_.host_ids();
    hosts_.resize(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const HostSpec& spec = *scenario_.find_host(ids[i]);
        HostModel& h = hosts_[i];
        h.id = spec.host_id;
        h.decoy = spec.is_decoy;
        h.phantom = spec.phantom;
        h.fidelity = spec.decoy_fidelity;
        h.value = spec.value;
        h.response = spec.response;
        for (const auto& svc : spec.services) {
            if (!svc.vulnerability) continue;
            h.advertised_vuln = true;
            if (svc.vulnerability->unauthenticated) h.unauth_vuln = true;
            if (!svc.spoofed && !spec.is_decoy) h.real_vuln = true;
        }
        for (const auto& acct : scenario_.accounts) {
            if (acct.priv_level != PrivLevel::admin) continue;
            const bool here =
                std::find(acct.planted_on.begin(), acct.planted_on.end(), spec.host_id) != acct.planted_on.end() ||
                std::find(spec.accounts.begin(), spec.accounts.end(), acct.username) != spec.accounts.end();
            if (!here) continue;
            h.admin_cred_here = true;
            if (!acct.is_decoy && !spec.is_decoy) h.real_admin_cred_here = true;
        }
    }
    for (const auto& e : scenario_.connectivity.entry) hosts_[*space_.host_position(e)].entry = true;
    for (const auto& [from, tos] : scenario_.connectivity.links) {
        const auto a = *space_.host_position(from);
        for (const auto& to : tos) {
            const auto b = *space_.host_position(to);
            hosts_[a].neighbors.push_back(b);
            hosts_[b].neighbors.push_back(a);
        }
    }
    for (auto& h : hosts_) {
        std::sort(h.neighbors.begin(), h.neighbors.end());
        h.neighbors.erase(std::unique(h.neighbors.begin(), h.neighbors.end()), h.neighbors.end());
    }
    if (scenario_.goal) goal_ = space_.host_position(*scenario_.goal);
}

std::size_t AttackerModel::host_index(const AttackerAction& a) const
{
    auto pos = space_.host_position(a.host);
    if (!pos) throw PreconditionError("action " + to_string(a) + " targets unknown host '" + a.host + "'");
    return *pos;
}

bool AttackerModel::reachable(const AttackerState& s, std::size_t h) const
{
    const auto& host = hosts_[h];
    if (host.decoy || host.entry) return true;
    return std::any_of(host.neighbors.begin(), host.neighbors.end(), [&](std::size_t g) {
        return !hosts_[g].decoy && at_least(s.per_host[g], KnowledgeLevel::foothold);
    });
}

bool AttackerModel::credential_works(const AttackerState& s) const
{
    if (!s.admin_cred) return false;
    for (std::size_t h = 0; h < hosts_.size(); ++h)
        if (hosts_[h].real_admin_cred_here && at_least(s.per_host[h], KnowledgeLevel::foothold)) return true;
    return false;
}

std::vector<AttackerAction> AttackerModel::legal_actions(const AttackerState& s) const
{
    std::vector<AttackerAction> out;
    out.push_back({ActionKind::do_nothing, {}});
    if (s.terminal) return out;

    if (std::any_of(s.per_host.begin(), s.per_host.end(),
                    [](KnowledgeLevel k) { return k == KnowledgeLevel::unknown; }))
        out.push_back({ActionKind::passive_recon, {}});

    for (std::size_t h = 0; h < hosts_.size(); ++h) {
        const auto& id = hosts_[h].id;
        switch (s.per_host[h]) {
        case KnowledgeLevel::discovered:
            out.push_back({ActionKind::active_recon, id});
            break;
        case KnowledgeLevel::scanned:
            out.push_back({ActionKind::vuln_search, id});
            out.push_back({ActionKind::explore_service, id});
            break;
        case KnowledgeLevel::vuln_known:
            out.push_back({ActionKind::exploit, id});
            break;
        case KnowledgeLevel::foothold:
            out.push_back({ActionKind::actions_target, id});
            break;
        case KnowledgeLevel::unknown:
        case KnowledgeLevel::looted:
            break;
        }
    }
    return out;
}

bool AttackerModel::is_legal(const AttackerState& s, const AttackerAction& a) const
{
    if (s.per_host.size() != hosts_.size()) return false;
    if (a.kind == ActionKind::do_nothing) return a.host.empty();
    if (s.terminal) return false;
    if (a.kind == ActionKind::passive_recon)
        return a.host.empty() && std::any_of(s.per_host.begin(), s.per_host.end(),
                                             [](KnowledgeLevel k) { return k == KnowledgeLevel::unknown; });
    const auto pos = space_.host_position(a.host);
    if (!pos) return false;
    const auto level = s.per_host[*pos];
    switch (a.kind) {
    case ActionKind::active_recon:
        return level == KnowledgeLevel::discovered;
    case ActionKind::vuln_search:
    case ActionKind::explore_service:
        return level == KnowledgeLevel::scanned;
    case ActionKind::exploit:
        return level == KnowledgeLevel::vuln_known;
    case ActionKind::actions_target:
        return level == KnowledgeLevel::foothold;
    default:
        return false;
    }
}

void AttackerModel::require_legal(const AttackerState& s, const AttackerAction& a) const
{
    if (!is_legal(s, a)) throw PreconditionError("illegal action " + to_string(a) + " in this state");
}

std::vector<std::pair<AttackerState, double>> AttackerModel::raw_outcomes(const AttackerState& s,
                                                                          const AttackerAction& a) const
{
    const auto& dyn = scenario_.dynamics;
    std::vector<std::pair<AttackerState, double>> out;

    auto with_level = [&](std::size_t h, KnowledgeLevel level) {
        AttackerState next = s;
        next.per_host[h] = level;
        return next;
    };
    auto binary = [&](AttackerState success, double p) {
        if (p > 0.0) out.emplace_back(std::move(success), p);
        if (p < 1.0) out.emplace_back(s, 1.0 - p);
    };

    switch (a.kind) {
    case ActionKind::do_nothing:
        out.emplace_back(s, 1.0);
        break;

    case ActionKind::passive_recon: {
        std::vector<std::size_t> unknown;
        for (std::size_t h = 0; h < hosts_.size(); ++h)
            if (s.per_host[h] == KnowledgeLevel::unknown) unknown.push_back(h);
        const std::size_t k = unknown.size();
        // Each unknown host is revealed independently.
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            AttackerState next = s;
            double p = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                if (mask & (std::size_t{1} << i)) {
                    next.per_host[unknown[i]] = KnowledgeLevel::discovered;
                    p *= dyn.p_discover;
                } else {
                    p *= 1.0 - dyn.p_discover;
                }
            }
            if (p > 0.0) out.emplace_back(std::move(next), p);
        }
        break;
    }

    case ActionKind::active_recon: {
        const auto h = host_index(a);
        const double p = hosts_[h].response.tcp_reset ? dyn.p_reset_success : 1.0;
        binary(with_level(h, KnowledgeLevel::scanned), p);
        break;
    }

    case ActionKind::vuln_search: {
        const auto h = host_index(a);
        const auto& host = hosts_[h];
        if (!host.advertised_vuln) {
            out.emplace_back(s, 1.0);
            break;
        }
        const double p = host.response.tcp_reset ? dyn.p_reset_success : 1.0;
        if (host.response.falsify_response && !host.decoy) {
            // A falsified answer throws the attacker's scan knowledge away.
            const double demote = p * dyn.p_falsify_demote;
            const double advance = p - demote;
            if (advance > 0.0) out.emplace_back(with_level(h, KnowledgeLevel::vuln_known), advance);
            if (demote > 0.0) out.emplace_back(with_level(h, KnowledgeLevel::discovered), demote);
            if (p < 1.0) out.emplace_back(s, 1.0 - p);
        } else {
            binary(with_level(h, KnowledgeLevel::vuln_known), p);
        }
        break;
    }

    case ActionKind::explore_service: {
        const auto h = host_index(a);
        const auto& host = hosts_[h];
        if (!host.unauth_vuln) {
            out.emplace_back(s, 1.0);
            break;
        }
        binary(with_level(h, KnowledgeLevel::vuln_known), host.response.tcp_reset ? dyn.p_reset_success : 1.0);
        break;
    }

    case ActionKind::exploit: {
        const auto h = host_index(a);
        const auto& host = hosts_[h];
        double p = 0.0;
        if (!host.decoy) {
            if (host.real_vuln && reachable(s, h))
                p = credential_works(s) ? dyn.p_admin_exploit : dyn.p_exploit;
        } else if (host.fidelity == DecoyFidelity::high_interaction) {
            p = dyn.p_exploit;
        } else if (host.response.falsify_response) {
            p = 1.0;  // the falsified success message always arrives
        }
        AttackerState success = with_level(h, KnowledgeLevel::foothold);
        if (host.admin_cred_here) success.admin_cred = true;
        binary(std::move(success), p);
        break;
    }

    case ActionKind::actions_target: {
        const auto h = host_index(a);
        AttackerState next = with_level(h, KnowledgeLevel::looted);
        if (goal_ && *goal_ == h) next.terminal = true;
        out.emplace_back(std::move(next), 1.0);
        break;
    }
    }
    return out;
}

StateDistribution AttackerModel::transition(const AttackerState& s, const AttackerAction& a) const
{
    require_legal(s, a);
    std::map<StateIndex, double> merged;
    for (const auto& [next, p] : raw_outcomes(s, a)) merged[space_.encode(next)] += p;
    StateDistribution out;
    out.reserve(merged.size());
    for (const auto& [next, p] : merged) out.push_back({next, p});
    return out;
}

double AttackerModel::attacker_alert_rate(const AttackerAction& a) const
{
    if (!targets_host(a.kind)) return 0.0;
    const auto k = idx(a.kind);
    double rate = scenario_.detection.ids[k];
    if (scenario_.hbss_monitoring()) rate += scenario_.detection.hbss[k];
    return rate;
}

double AttackerModel::true_alert_rate(const AttackerState& s, const AttackerAction& a) const
{
    require_legal(s, a);
    if (!targets_host(a.kind)) return 0.0;
    if (hosts_[host_index(a)].decoy) return scenario_.detection.decoy;
    return attacker_alert_rate(a);
}

FeatureVector AttackerModel::features(const AttackerState& s, const AttackerAction& a, FeatureMode mode) const
{
    require_legal(s, a);
    FeatureVector f(kNumFeatures, 0.0);
    // The absorbing terminal pair is reward-free under every psi.
    if (s.terminal) return f;

    const bool truth = mode == FeatureMode::ground_truth;
    f[idx(Feature::bias)] = 1.0;
    f[idx(Feature::time_cost)] = 1.0;

    if (!targets_host(a.kind)) {
        if (a.kind == ActionKind::passive_recon) {
            double gain = 0.0;
            for (std::size_t h = 0; h < hosts_.size(); ++h)
                if (s.per_host[h] == KnowledgeLevel::unknown && !(truth && hosts_[h].decoy))
                    gain += scenario_.dynamics.p_discover;
            f[idx(Feature::info_gain)] = gain;
        }
        return f;
    }

    const auto h = host_index(a);
    const auto& host = hosts_[h];
    const bool worthless = truth && host.decoy;

    double gain = 0.0, foothold = 0.0, looted = 0.0;
    for (const auto& [next, p] : raw_outcomes(s, a)) {
        const int before = static_cast<int>(s.per_host[h]);
        const int after = static_cast<int>(next.per_host[h]);
        if (after > before) gain += p * (after - before);
        if (next.per_host[h] == KnowledgeLevel::foothold && s.per_host[h] != KnowledgeLevel::foothold)
            foothold += p;
        if (next.per_host[h] == KnowledgeLevel::looted && s.per_host[h] != KnowledgeLevel::looted) looted += p;
    }
    if (!worthless) {
        f[idx(Feature::info_gain)] = gain;
        f[idx(Feature::foothold_value)] = foothold * host.value;
        f[idx(Feature::loot_value)] = looted * host.value;
    }
    f[idx(Feature::alert_exposure)] = truth ? true_alert_rate(s, a) : attacker_alert_rate(a);
    f[idx(Feature::time_cost)] = host.response.slowdown;
    if (a.kind == ActionKind::exploit && s.admin_cred) f[idx(Feature::admin_use)] = 1.0;
    return f;
}

std::vector<AttackerAction> legal_actions(const AttackerModel& model, const AttackerState& s)
{
    return model.legal_actions(s);
}

StateDistribution transition(const AttackerModel& model, const AttackerState& s, const AttackerAction& a)
{
    return model.transition(s, a);
}

FeatureVector features(const AttackerModel& model, const AttackerState& s, const AttackerAction& a,
                       FeatureMode mode)
{
    return model.features(s, a, mode);
}

// ---------------------------------------------------------------------------------------------
// AttackerMdp

AttackerMdp::AttackerMdp(Scenario scenario, std::size_t host_cap)
    : model_(std::move(scenario), host_cap), hash_(cyberirl::scenario_hash(model_.scenario()))
{
    const auto& space = model_.space();

    std::deque<StateIndex> frontier{0};
    local_.emplace(0, 0);
    global_.push_back(0);

    std::vector<double> visible, truth;
    std::vector<Outcome> row;
    while (!frontier.empty()) {
        const StateIndex g = frontier.front();
        frontier.pop_front();
        const AttackerState s = space.decode(g);
        tabular_.add_state();
        for (const auto& a : model_.legal_actions(s)) {
            row.clear();
            for (const auto& [next, p] : model_.transition(s, a)) {
                auto [it, inserted] = local_.emplace(next, static_cast<std::uint32_t>(global_.size()));
                if (inserted) {
                    global_.push_back(next);
                    frontier.push_back(next);
                }
                row.push_back({it->second, p});
            }
            tabular_.add_action(row);
            actions_.push_back(a);
            const auto fv = model_.features(s, a, FeatureMode::attacker_visible);
            const auto ft = model_.features(s, a, FeatureMode::ground_truth);
            visible.insert(visible.end(), fv.begin(), fv.end());
            truth.insert(truth.end(), ft.begin(), ft.end());
        }
    }
    tabular_.set_initial_state(0);
    tabular_.finalize();

    visible_ = FeatureTable(kNumFeatures, actions_.size());
    truth_ = FeatureTable(kNumFeatures, actions_.size());
    for (std::size_t slot = 0; slot < actions_.size(); ++slot)
        for (std::size_t i = 0; i < kNumFeatures; ++i) {
            visible_.row(slot)[i] = visible[slot * kNumFeatures + i];
            truth_.row(slot)[i] = truth[slot * kNumFeatures + i];
        }
}

std::optional<std::uint32_t> AttackerMdp::local_index(StateIndex global) const
{
    auto it = local_.find(global);
    if (it == local_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> AttackerMdp::slot_for(std::uint32_t local, const AttackerAction& a) const
{
    for (std::size_t slot = tabular_.slot_begin(local); slot < tabular_.slot_end(local); ++slot)
        if (actions_[slot] == a) return slot;
    return std::nullopt;
}

}  // namespace cyberirl
