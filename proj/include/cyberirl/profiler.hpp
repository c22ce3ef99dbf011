#pragma once

#include "cyberirl/mdp.hpp"
#include "cyberirl/scenario.hpp"
#include "cyberirl/sim.hpp"

#include "json.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cyberirl {

inline constexpr std::string_view kNotInferable = "not_inferable";

/// Heuristic thresholds. Defaults are conventions, not measured constants.
struct ProfilerConfig {
    double weight_low = 1.0;
    double weight_medium = 2.0;
    double weight_high = 4.0;
    /// Inter-action gap coefficient of variation below which the actor looks scripted.
    double scripted_cv = 0.05;
    /// Fewer non-idle actions than this leaves sentience unknown.
    std::size_t min_actions_for_timing = 3;
    /// Deception-aware when the post-contact decoy interaction rate drops below this fraction of
    /// the pre-contact rate.
    double aware_ratio = 0.5;
    double recon_heavy_fraction = 0.5;
    double exploit_early_fraction = 0.25;
    double stealthy_threshold = 0.8;

    bool operator==(const ProfilerConfig&) const = default;
};

struct HostInteraction {
    std::size_t count = 0;
    /// Highest knowledge level the attacker must have held to issue its actions on the host.
    KnowledgeLevel max_level = KnowledgeLevel::unknown;

    bool operator==(const HostInteraction&) const = default;
};

struct ProfileMetrics {
    std::map<std::string, HostInteraction> target_interactions;
    std::size_t record_count = 0;
    double attack_duration = 0.0;  // wall-time units
    std::size_t alert_count = 0;
    std::array<std::size_t, 3> severity_histogram{};  // low, medium, high
    double weighted_alerts = 0.0;
    double stealth = 1.0;  // 1 - min(1, weighted_alerts / record_count)
    /// Wall time elapsed up to the end of the first alerting action.
    std::optional<double> time_to_first_alert;

    bool operator==(const ProfileMetrics&) const = default;
};

/// Throws PreconditionError on an empty or unchained trajectory.
ProfileMetrics compute_metrics(const Trajectory& t, const ProfilerConfig& cfg = {});

enum class Sentience { likely_scripted, likely_human, unknown };
std::string_view to_string(Sentience s);

struct InferredProfile {
    Sentience sentience = Sentience::unknown;
    double timing_cv = 0.0;
    double expertise = 0.0;  // [0, 1]
    bool deception_aware = false;
    bool deception_aware_low_confidence = true;
    double pre_contact_decoy_rate = 0.0;
    double post_contact_decoy_rate = 0.0;
    std::optional<std::string> goal_estimate;
    std::vector<std::string> strategy_tags;
    int threat_level = 1;  // 1..5
    std::string fingerprint;
    std::string emotional_state{kNotInferable};
    std::string num_attackers{kNotInferable};

    bool operator==(const InferredProfile&) const = default;
};

/// Uses only defender-visible record fields (actions, targets, alerts, wall time) plus the
/// scenario's advertised host values. Throws PreconditionError on an empty set.
InferredProfile infer_profile(const TrajectorySet& ts, const Scenario& scenario, const ProfilerConfig& cfg = {});

struct ProfileReport {
    ProfileMetrics aggregate;  // over all records of the set
    double mean_stealth = 0.0;
    double mean_duration = 0.0;
    InferredProfile inferred;
};

ProfileReport build_report(const TrajectorySet& ts, const Scenario& scenario, const ProfilerConfig& cfg = {});

nlohmann::json to_json(const ProfileMetrics& m);
nlohmann::json to_json(const InferredProfile& p);
nlohmann::json to_json(const ProfilerConfig& c);

}  // namespace cyberirl
