#pragma once

#include "cyberirl/mdp.hpp"
#include "cyberirl/softrl.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cyberirl {

inline constexpr int kLogFormatVersion = 1;

enum class AlertSource { ids, hbss, decoy };
enum class Severity { low, medium, high };

std::string_view to_string(AlertSource s);
std::string_view to_string(Severity s);
AlertSource alert_source_from_string(std::string_view s);
Severity severity_from_string(std::string_view s);

/// Severity of an IDS alert raised by each host-targeted action kind.
Severity ids_severity(ActionKind k);

struct Alert {
    std::size_t step = 0;
    AlertSource source = AlertSource::ids;
    Severity severity = Severity::low;
    std::string host_id;
    ActionKind action_kind = ActionKind::do_nothing;

    bool operator==(const Alert&) const = default;
};

struct TrajectoryRecord {
    std::size_t step = 0;
    StateIndex state_index = 0;
    AttackerAction action;
    StateIndex next_state_index = 0;
    FeatureVector feature_vector;  // attacker-visible
    std::vector<Alert> alerts;
    double wall_time_units = 1.0;

    bool operator==(const TrajectoryRecord&) const = default;
};

struct Trajectory {
    std::string scenario_ref;  // scenario content hash
    std::uint64_t seed = 0;
    std::vector<TrajectoryRecord> records;
    bool terminated = false;
    /// False when a reactive defender changed the terrain mid-episode.
    bool stationary = true;

    bool operator==(const Trajectory&) const = default;
};

struct TrajectorySet {
    std::string scenario_hash;
    std::vector<Trajectory> trajectories;
    /// Free-form description of how the set was produced (command, flags, policy parameters).
    nlohmann::json provenance = nlohmann::json::object();

    bool operator==(const TrajectorySet&) const = default;
};

/// A scripted reactive defender: once an alert at or above `trigger` fires on a real host, apply
/// `response` to that host for the rest of the episode. Text form "tcp_reset:medium".
struct DefenderRule {
    enum class Response { tcp_reset, traffic_control, falsify_response };
    Response response = Response::tcp_reset;
    Severity trigger = Severity::medium;
    double slowdown = 2.0;  // traffic_control only

    bool operator==(const DefenderRule&) const = default;
};

DefenderRule parse_defender_rule(std::string_view text);
std::string to_string(const DefenderRule& rule);

struct EpisodeOptions {
    std::uint64_t seed = 0;
    std::size_t horizon = 60;
    std::optional<DefenderRule> defender;
};

/// Samples one episode. Step t draws the action from substream (seed, t, 0), the successor from
/// (seed, t, 1) and alerts from (seed, t, 2). The policy is indexed by the slots of `mdp`; states
/// the compiled MDP never reached (possible only under a reactive defender) fall back to uniform
/// over the legal actions. Stops after a transition into a terminal state or after `horizon` steps.
/// Throws PreconditionError on horizon 0 or a policy sized for another MDP.
Trajectory run_episode(const AttackerMdp& mdp, const Policy& policy, const EpisodeOptions& options);

struct SummaryStats {
    std::size_t episodes = 0;
    std::size_t num_hosts = 0;
    std::size_t num_decoys = 0;
    double mean_length = 0.0;
    double mean_ids_alerts = 0.0;
    double mean_hbss_alerts = 0.0;
    double mean_decoy_alerts = 0.0;
    double mean_real_host_ids_alerts = 0.0;
    double se_real_host_ids_alerts = 0.0;
    std::size_t decoy_interactions = 0;  // records whose target is a decoy or phantom
    double success_rate = 0.0;           // episodes that reached the terminal state
    double mean_steps_to_first_real_foothold = 0.0;  // censored at the horizon
    double se_steps_to_first_real_foothold = 0.0;

    bool operator==(const SummaryStats&) const = default;
};

/// Number of steps until the attacker first holds a foothold on a real host, or `horizon` when
/// that never happens.
std::size_t steps_to_first_real_foothold(const AttackerModel& model, const Trajectory& t, std::size_t horizon);

/// IDS alerts raised on non-decoy hosts.
std::size_t real_host_ids_alerts(const AttackerModel& model, const Trajectory& t);

SummaryStats summarize(const AttackerModel& model, const TrajectorySet& ts, std::size_t horizon);

struct Batch {
    TrajectorySet set;
    SummaryStats stats;
};

/// Episodes with seeds base_seed .. base_seed + n - 1. Throws PreconditionError on n == 0.
Batch run_batch(const AttackerMdp& mdp, const Policy& policy, std::size_t n, std::uint64_t base_seed,
                std::size_t horizon, const std::optional<DefenderRule>& defender = std::nullopt);

nlohmann::json to_json(const SummaryStats& s);

/// Line-delimited log: one header object, then per trajectory one "episode" object followed by
/// one "record" object per step.
void write_log(const TrajectorySet& ts, std::ostream& out);
std::string write_log(const TrajectorySet& ts);

/// Throws ParseError (with the line number) on malformed lines and ValidationError on broken
/// state chaining or scenario-hash mismatch.
TrajectorySet read_log(std::istream& in);
TrajectorySet read_log(std::string_view text);
TrajectorySet read_log_file(const std::string& path);

}  // namespace cyberirl
