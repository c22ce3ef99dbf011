#pragma once

#include "cyberirl/actions.hpp"
#include "cyberirl/scenario.hpp"
#include "cyberirl/tabular.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cyberirl {

/// Attacker's knowledge of one host, in kill-chain order.
enum class KnowledgeLevel : std::uint8_t { unknown, discovered, scanned, vuln_known, foothold, looted };

inline constexpr std::size_t kNumKnowledgeLevels = 6;

std::string_view to_string(KnowledgeLevel k);

using StateIndex = std::uint64_t;

struct AttackerState {
    /// One entry per host, in lexicographic host_id order.
    std::vector<KnowledgeLevel> per_host;
    bool admin_cred = false;
    bool terminal = false;

    bool operator==(const AttackerState&) const = default;
};

/// Dense mixed-radix state indexing.
///
///   index = sum_h level(h) * 6^h  +  admin_cred * 6^H  +  terminal * 2 * 6^H
///
/// where h runs over hosts sorted lexicographically by host_id (h = 0 is the least significant
/// digit) and H is the host count. Index 0 is the initial state: everything unknown, no admin
/// credential, not terminal. Trajectory logs store these indices.
class StateSpace {
public:
    static constexpr std::size_t kDefaultHostCap = 8;

    /// Throws CapacityError when the scenario has more hosts than host_cap.
    explicit StateSpace(const Scenario& scenario, std::size_t host_cap = kDefaultHostCap);

    std::size_t num_hosts() const { return host_ids_.size(); }
    StateIndex size() const { return radix_ * 4; }
    const std::vector<std::string>& host_ids() const { return host_ids_; }
    std::optional<std::size_t> host_position(std::string_view host_id) const;

    StateIndex encode(const AttackerState& s) const;
    AttackerState decode(StateIndex index) const;
    AttackerState initial_state() const;

private:
    std::vector<std::string> host_ids_;
    StateIndex radix_ = 1;  // 6^H
};

/// enumerate_states: the bijection between AttackerState and [0, |S|).
StateSpace enumerate_states(const Scenario& scenario, std::size_t host_cap = StateSpace::kDefaultHostCap);

/// Coordinates of the reward feature vector, in order.
enum class Feature : std::size_t {
    bias,
    info_gain,
    foothold_value,
    loot_value,
    alert_exposure,
    time_cost,
    admin_use,
};

inline constexpr std::size_t kNumFeatures = 7;

const std::array<std::string_view, kNumFeatures>& feature_names();

using FeatureVector = std::vector<double>;

/// What the attacker can see versus what is actually true. Attacker-visible features price decoys
/// at their advertised value and assume normal detection; ground truth pays nothing for anything
/// gained on a decoy and uses the real alert rates.
enum class FeatureMode { attacker_visible, ground_truth };

/// Parameters of the linear reward r(s, a) = psi . f(s, a).
struct RewardParams {
    std::vector<double> psi;

    bool operator==(const RewardParams&) const = default;
};

/// psi . f. Throws PreconditionError on dimension mismatch.
double reward(const RewardParams& params, std::span<const double> f);

struct StateOutcome {
    StateIndex next = 0;
    double prob = 0.0;

    bool operator==(const StateOutcome&) const = default;
};

using StateDistribution = std::vector<StateOutcome>;

/// Host facts the dynamics consult, precomputed once per scenario.
struct HostModel {
    std::string id;
    bool decoy = false;
    bool phantom = false;
    DecoyFidelity fidelity = DecoyFidelity::low_interaction;
    bool real_vuln = false;        // exploitable, non-spoofed vulnerability on a real host
    bool advertised_vuln = false;  // any vulnerability a scan would report, spoofed included
    bool unauth_vuln = false;      // advertised vulnerability reachable without a login
    double value = 0.0;            // advertised value
    ResponseFlags response;
    bool entry = false;
    std::vector<std::size_t> neighbors;
    bool admin_cred_here = false;       // an admin credential (real or planted) can be harvested here
    bool real_admin_cred_here = false;  // ... and it is a working one
};

/// The attacker MDP over one scenario. The scenario is copied in, so the model is self-contained
/// and immutable once built.
class AttackerModel {
public:
    explicit AttackerModel(Scenario scenario, std::size_t host_cap = StateSpace::kDefaultHostCap);

    const Scenario& scenario() const { return scenario_; }
    const StateSpace& space() const { return space_; }
    const std::vector<HostModel>& hosts() const { return hosts_; }
    std::optional<std::size_t> goal() const { return goal_; }

    std::vector<AttackerAction> legal_actions(const AttackerState& s) const;
    bool is_legal(const AttackerState& s, const AttackerAction& a) const;

    /// Throws PreconditionError when a is not legal in s.
    StateDistribution transition(const AttackerState& s, const AttackerAction& a) const;
    FeatureVector features(const AttackerState& s, const AttackerAction& a,
                           FeatureMode mode = FeatureMode::attacker_visible) const;

    /// Expected number of alerts the defender actually sees for (s, a).
    double true_alert_rate(const AttackerState& s, const AttackerAction& a) const;

    /// Whether the held admin credential (if any) actually works.
    bool credential_works(const AttackerState& s) const;

private:
    std::size_t host_index(const AttackerAction& a) const;
    bool reachable(const AttackerState& s, std::size_t h) const;
    double attacker_alert_rate(const AttackerAction& a) const;
    void require_legal(const AttackerState& s, const AttackerAction& a) const;

    /// Successor-state outcomes as (state, probability) before merging.
    std::vector<std::pair<AttackerState, double>> raw_outcomes(const AttackerState& s,
                                                               const AttackerAction& a) const;

    Scenario scenario_;
    StateSpace space_;
    std::vector<HostModel> hosts_;
    std::optional<std::size_t> goal_;
};

// Free-function forms of the model operations.
std::vector<AttackerAction> legal_actions(const AttackerModel& model, const AttackerState& s);
StateDistribution transition(const AttackerModel& model, const AttackerState& s, const AttackerAction& a);
FeatureVector features(const AttackerModel& model, const AttackerState& s, const AttackerAction& a,
                       FeatureMode mode = FeatureMode::attacker_visible);

/// The attacker model compiled into tabular form over the states reachable from the initial
/// state. Local state 0 is the initial state; states are numbered in breadth-first order, so
/// reverse index order roughly follows reverse kill-chain progress.
class AttackerMdp {
public:
    explicit AttackerMdp(Scenario scenario, std::size_t host_cap = StateSpace::kDefaultHostCap);

    const AttackerModel& model() const { return model_; }
    const Scenario& scenario() const { return model_.scenario(); }
    const std::string& scenario_hash() const { return hash_; }
    const TabularMdp& tabular() const { return tabular_; }
    const FeatureTable& features(FeatureMode mode = FeatureMode::attacker_visible) const
    {
        return mode == FeatureMode::attacker_visible ? visible_ : truth_;
    }

    std::size_t num_states() const { return tabular_.num_states(); }
    std::size_t num_slots() const { return tabular_.num_slots(); }

    StateIndex state_index(std::uint32_t local) const { return global_[local]; }
    std::optional<std::uint32_t> local_index(StateIndex global) const;

    const AttackerAction& action(std::size_t slot) const { return actions_[slot]; }
    std::optional<std::size_t> slot_for(std::uint32_t local, const AttackerAction& a) const;

private:
    AttackerModel model_;
    std::string hash_;
    TabularMdp tabular_;
    FeatureTable visible_;
    FeatureTable truth_;
    std::vector<StateIndex> global_;
    std::unordered_map<StateIndex, std::uint32_t> local_;
    std::vector<AttackerAction> actions_;
};

}  // namespace cyberirl
