#pragma once

#include "cyberirl/terrain.hpp"

#include "json.hpp"

#include <array>
#include <string>
#include <string_view>
#include <variant>

namespace cyberirl {

/// The seven high-level attacker action categories, in kill-chain order.
enum class ActionKind {
    do_nothing,
    passive_recon,
    active_recon,
    vuln_search,
    explore_service,
    exploit,
    actions_target,
};

inline constexpr std::size_t kNumActionKinds = 7;

std::string_view to_string(ActionKind k);
ActionKind action_kind_from_string(std::string_view s);

/// True for the kinds that carry a target host.
constexpr bool targets_host(ActionKind k)
{
    return k != ActionKind::do_nothing && k != ActionKind::passive_recon;
}

struct AttackerAction {
    ActionKind kind = ActionKind::do_nothing;
    std::string host;  // empty unless targets_host(kind)

    bool operator==(const AttackerAction&) const = default;
};

/// "exploit(web01)", "passive_recon".
std::string to_string(const AttackerAction& a);
AttackerAction parse_attacker_action(std::string_view text);

// Defender moves. The first three are observational; the rest plant deception.
namespace deception {

struct DoNothing {
    bool operator==(const DoNothing&) const = default;
};
struct MonitorIds {
    bool operator==(const MonitorIds&) const = default;
};
struct MonitorHbss {
    bool operator==(const MonitorHbss&) const = default;
};
struct LaunchDecoy {
    HostSpec decoy;
    bool operator==(const LaunchDecoy&) const = default;
};
struct PingResponder {
    std::string address;
    bool operator==(const PingResponder&) const = default;
};
struct Portspoof {
    std::string host;
    std::vector<ServiceSpec> services;
    bool operator==(const Portspoof&) const = default;
};
struct FalsifyResponse {
    std::string host;
    bool operator==(const FalsifyResponse&) const = default;
};
struct TrafficControl {
    std::string host;
    double slowdown = 2.0;
    bool operator==(const TrafficControl&) const = default;
};
struct TcpReset {
    std::string host;
    bool operator==(const TcpReset&) const = default;
};
struct CreateUser {
    AccountSpec account;
    bool operator==(const CreateUser&) const = default;
};
struct PlantCreds {
    AccountSpec account;
    bool operator==(const PlantCreds&) const = default;
};

}  // namespace deception

using DeceptionAction = std::variant<deception::DoNothing,
                                     deception::MonitorIds,
                                     deception::MonitorHbss,
                                     deception::LaunchDecoy,
                                     deception::PingResponder,
                                     deception::Portspoof,
                                     deception::FalsifyResponse,
                                     deception::TrafficControl,
                                     deception::TcpReset,
                                     deception::CreateUser,
                                     deception::PlantCreds>;

std::string_view deception_name(const DeceptionAction& d);

// JSON encodings shared by the scenario document and the CLI.
nlohmann::json to_json(const ServiceSpec& s);
nlohmann::json to_json(const HostSpec& h);
nlohmann::json to_json(const AccountSpec& a);
nlohmann::json to_json(const DeceptionAction& d);

ServiceSpec service_from_json(const nlohmann::json& j, const std::string& where);
HostSpec host_from_json(const nlohmann::json& j, const std::string& where);
AccountSpec account_from_json(const nlohmann::json& j, const std::string& where);
DeceptionAction deception_from_json(const nlohmann::json& j, const std::string& where);

}  // namespace cyberirl
