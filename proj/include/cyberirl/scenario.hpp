#pragma once

#include "cyberirl/actions.hpp"
#include "cyberirl/terrain.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cyberirl {

inline constexpr int kScenarioFormatVersion = 1;

/// Boolean reachability. `entry` hosts are reachable from outside; `links` are undirected
/// pivot edges usable once the attacker holds a real foothold on one endpoint.
struct Connectivity {
    std::vector<std::string> entry;
    std::map<std::string, std::vector<std::string>> links;

    bool operator==(const Connectivity&) const = default;
};

/// Per-action-kind alert probabilities.
struct DetectionModel {
    std::array<double, kNumActionKinds> ids{0.0, 0.0, 0.3, 0.4, 0.0, 0.7, 0.5};
    /// Only consulted while a monitor_HBSS placement is active.
    std::array<double, kNumActionKinds> hbss{0.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.4};
    /// Any host-targeted action against a decoy or phantom raises a decoy alert with this probability.
    double decoy = 1.0;

    bool operator==(const DetectionModel&) const = default;
};

struct Dynamics {
    double p_discover = 0.6;
    double p_exploit = 0.8;
    /// Exploit success on a real host while holding a working admin credential.
    double p_admin_exploit = 0.95;
    /// Success probability of recon and vuln probing against a TCP_reset host.
    double p_reset_success = 0.3;
    /// vuln_search against a falsify_response real host returns a bogus answer and the
    /// attacker's scan knowledge is demoted back to discovered.
    double p_falsify_demote = 0.5;

    bool operator==(const Dynamics&) const = default;
};

/// The simulated terrain. Plain value type; every mutation goes through apply_deception and
/// returns a new Scenario.
struct Scenario {
    std::vector<HostSpec> hosts;
    std::vector<AccountSpec> accounts;
    Connectivity connectivity;
    DetectionModel detection;
    Dynamics dynamics;
    /// Looting this host ends the episode. Must be a real host.
    std::optional<std::string> goal;
    /// Deceptions already folded into the terrain, in application order.
    std::vector<DeceptionAction> deceptions;

    std::size_t num_hosts() const { return hosts.size(); }
    std::size_t num_decoys() const;
    const HostSpec* find_host(std::string_view id) const;
    const AccountSpec* find_account(std::string_view username) const;
    bool hbss_monitoring() const;

    bool operator==(const Scenario&) const = default;
};

/// Throws ValidationError naming the offending field.
void validate(const Scenario& s);

Scenario load_scenario(std::string_view document);
Scenario load_scenario_file(const std::filesystem::path& path);

/// Canonical encoding; serialize(load_scenario(serialize(s))) == serialize(s).
std::string serialize(const Scenario& s);

/// Content hash of the canonical encoding.
std::string scenario_hash(const Scenario& s);

/// Folds one defender action into the terrain. The input is left untouched.
Scenario apply_deception(const Scenario& s, const DeceptionAction& d);

/// The deception-absent counterpart: decoys, phantoms, decoy accounts, spoofed services and
/// response flags removed. Observational placements (monitor_IDS/HBSS) are kept.
Scenario strip_deception(const Scenario& s);

}  // namespace cyberirl
