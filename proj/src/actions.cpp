#include "cyberirl/actions.hpp"

#include "cyberirl/error.hpp"
#include "json_fields.hpp"

#include <array>

namespace cyberirl {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kNumActionKinds> kKindNames = {
    "do_nothing", "passive_recon", "active_recon", "vuln_search",
    "explore_service", "exploit", "actions_target",
};

std::string_view os_name(OsKind os)
{
    return os == OsKind::windows ? "windows" : "linux";
}

OsKind os_from(const std::string& s, const std::string& where)
{
    if (s == "windows") return OsKind::windows;
    if (s == "linux") return OsKind::linux;
    throw ParseError(where + ": unknown os '" + s + "'");
}

std::string_view fidelity_name(DecoyFidelity f)
{
    return f == DecoyFidelity::low_interaction ? "low_interaction" : "high_interaction";
}

DecoyFidelity fidelity_from(const std::string& s, const std::string& where)
{
    if (s == "low_interaction") return DecoyFidelity::low_interaction;
    if (s == "high_interaction") return DecoyFidelity::high_interaction;
    throw ParseError(where + ": unknown decoy_fidelity '" + s + "'");
}

}  // namespace

std::string_view to_string(ActionKind k)
{
    return kKindNames[static_cast<std::size_t>(k)];
}

ActionKind action_kind_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kKindNames.size(); ++i)
        if (kKindNames[i] == s) return static_cast<ActionKind>(i);
    throw ParseError("unknown action kind '" + std::string(s) + "'");
}

std::string to_string(const AttackerAction& a)
{
    std::string out(to_string(a.kind));
    if (targets_host(a.kind)) out += "(" + a.host + ")";
    return out;
}

AttackerAction parse_attacker_action(std::string_view text)
{
    AttackerAction a;
    auto open = text.find('(');
    if (open == std::string_view::npos) {
        a.kind = action_kind_from_string(text);
        if (targets_host(a.kind))
            throw ParseError("action '" + std::string(text) + "' needs a target host");
        return a;
    }
    if (text.back() != ')')
        throw ParseError("malformed action '" + std::string(text) + "'");
    a.kind = action_kind_from_string(text.substr(0, open));
    a.host = std::string(text.substr(open + 1, text.size() - open - 2));
    if (!targets_host(a.kind) || a.host.empty())
        throw ParseError("malformed action '" + std::string(text) + "'");
    return a;
}

std::string_view deception_name(const DeceptionAction& d)
{
    static constexpr std::array<std::string_view, std::variant_size_v<DeceptionAction>> names = {
        "do_nothing", "monitor_IDS", "monitor_HBSS", "launch_decoy", "ping_responder", "portspoof",
        "falsify_response", "traffic_control", "TCP_reset", "create_user", "plant_creds",
    };
    return names[d.index()];
}

json to_json(const ServiceSpec& s)
{
    json j = {{"name", s.name}, {"version", s.version}, {"port", s.port}, {"spoofed", s.spoofed}};
    if (s.vulnerability)
        j["vulnerability"] = {{"id", s.vulnerability->id},
                              {"unauthenticated", s.vulnerability->unauthenticated}};
    else
        j["vulnerability"] = nullptr;
    return j;
}

json to_json(const HostSpec& h)
{
    json services = json::array();
    for (const auto& s : h.services) services.push_back(to_json(s));
    return {
        {"host_id", h.host_id},
        {"ip_address", h.ip_address},
        {"os", os_name(h.os)},
        {"os_version", h.os_version},
        {"is_decoy", h.is_decoy},
        {"decoy_fidelity", fidelity_name(h.decoy_fidelity)},
        {"phantom", h.phantom},
        {"services", services},
        {"accounts", h.accounts},
        {"purpose", h.purpose},
        {"value", h.value},
        {"response",
         {{"falsify_response", h.response.falsify_response},
          {"tcp_reset", h.response.tcp_reset},
          {"slowdown", h.response.slowdown}}},
    };
}

json to_json(const AccountSpec& a)
{
    return {
        {"username", a.username},
        {"priv_level", a.priv_level == PrivLevel::admin ? "admin" : "user"},
        {"is_decoy", a.is_decoy},
        {"planted_on", a.planted_on},
        {"password", a.password},
        {"pwd_hash", a.pwd_hash},
    };
}

json to_json(const DeceptionAction& d)
{
    json j = {{"action", deception_name(d)}};
    std::visit(
        [&j](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, deception::LaunchDecoy>) {
                j["decoy"] = to_json(v.decoy);
            } else if constexpr (std::is_same_v<T, deception::PingResponder>) {
                j["address"] = v.address;
            } else if constexpr (std::is_same_v<T, deception::Portspoof>) {
                j["host"] = v.host;
                json services = json::array();
                for (const auto& s : v.services) services.push_back(to_json(s));
                j["services"] = services;
            } else if constexpr (std::is_same_v<T, deception::FalsifyResponse> ||
                                 std::is_same_v<T, deception::TcpReset>) {
                j["host"] = v.host;
            } else if constexpr (std::is_same_v<T, deception::TrafficControl>) {
                j["host"] = v.host;
                j["slowdown"] = v.slowdown;
            } else if constexpr (std::is_same_v<T, deception::CreateUser> ||
                                 std::is_same_v<T, deception::PlantCreds>) {
                j["account"] = to_json(v.account);
            }
        },
        d);
    return j;
}

ServiceSpec service_from_json(const json& j, const std::string& where)
{
    detail::require_object(j, where);
    ServiceSpec s;
    s.name = detail::get_string(j, "name", where);
    s.version = detail::get_string(j, "version", where, "");
    s.port = static_cast<int>(detail::get_int(j, "port", where));
    s.spoofed = detail::get_bool(j, "spoofed", where, false);
    if (auto it = j.find("vulnerability"); it != j.end() && !it->is_null()) {
        const std::string w = where + ".vulnerability";
        detail::require_object(*it, w);
        s.vulnerability = VulnSpec{detail::get_string(*it, "id", w),
                                   detail::get_bool(*it, "unauthenticated", w, false)};
    }
    return s;
}

HostSpec host_from_json(const json& j, const std::string& where)
{
    detail::require_object(j, where);
    HostSpec h;
    h.host_id = detail::get_string(j, "host_id", where, "");
    h.ip_address = detail::get_string(j, "ip_address", where);
    h.os = os_from(detail::get_string(j, "os", where, "linux"), where + ".os");
    h.os_version = detail::get_string(j, "os_version", where, "");
    h.is_decoy = detail::get_bool(j, "is_decoy", where, false);
    h.decoy_fidelity = fidelity_from(
        detail::get_string(j, "decoy_fidelity", where, "low_interaction"), where + ".decoy_fidelity");
    h.phantom = detail::get_bool(j, "phantom", where, false);
    if (auto it = j.find("services"); it != j.end()) {
        detail::require_array(*it, where + ".services");
        for (std::size_t i = 0; i < it->size(); ++i)
            h.services.push_back(
                service_from_json((*it)[i], where + ".services[" + std::to_string(i) + "]"));
    }
    h.accounts = detail::get_string_list(j, "accounts", where);
    h.purpose = detail::get_string(j, "purpose", where, "");
    h.value = detail::get_double(j, "value", where, 0.0);
    if (auto it = j.find("response"); it != j.end()) {
        const std::string w = where + ".response";
        detail::require_object(*it, w);
        h.response.falsify_response = detail::get_bool(*it, "falsify_response", w, false);
        h.response.tcp_reset = detail::get_bool(*it, "tcp_reset", w, false);
        h.response.slowdown = detail::get_double(*it, "slowdown", w, 1.0);
    }
    return h;
}

AccountSpec account_from_json(const json& j, const std::string& where)
{
    detail::require_object(j, where);
    AccountSpec a;
    a.username = detail::get_string(j, "username", where);
    const auto priv = detail::get_string(j, "priv_level", where, "user");
    if (priv == "admin")
        a.priv_level = PrivLevel::admin;
    else if (priv == "user")
        a.priv_level = PrivLevel::user;
    else
        throw ParseError(where + ".priv_level: unknown level '" + priv + "'");
    a.is_decoy = detail::get_bool(j, "is_decoy", where, false);
    a.planted_on = detail::get_string_list(j, "planted_on", where);
    a.password = detail::get_string(j, "password", where, "");
    a.pwd_hash = detail::get_string(j, "pwd_hash", where, "");
    return a;
}

DeceptionAction deception_from_json(const json& j, const std::string& where)
{
    detail::require_object(j, where);
    const auto name = detail::get_string(j, "action", where);
    if (name == "do_nothing") return deception::DoNothing{};
    if (name == "monitor_IDS") return deception::MonitorIds{};
    if (name == "monitor_HBSS") return deception::MonitorHbss{};
    if (name == "launch_decoy") {
        if (!j.contains("decoy")) throw ParseError(where + ".decoy: missing field");
        return deception::LaunchDecoy{host_from_json(j.at("decoy"), where + ".decoy")};
    }
    if (name == "ping_responder")
        return deception::PingResponder{detail::get_string(j, "address", where)};
    if (name == "portspoof") {
        deception::Portspoof p{detail::get_string(j, "host", where), {}};
        if (!j.contains("services")) throw ParseError(where + ".services: missing field");
        detail::require_array(j.at("services"), where + ".services");
        for (std::size_t i = 0; i < j.at("services").size(); ++i)
            p.services.push_back(service_from_json(
                j.at("services")[i], where + ".services[" + std::to_string(i) + "]"));
        return p;
    }
    if (name == "falsify_response")
        return deception::FalsifyResponse{detail::get_string(j, "host", where)};
    if (name == "traffic_control")
        return deception::TrafficControl{detail::get_string(j, "host", where),
                                         detail::get_double(j, "slowdown", where, 2.0)};
    if (name == "TCP_reset") return deception::TcpReset{detail::get_string(j, "host", where)};
    if (name == "create_user" || name == "plant_creds") {
        if (!j.contains("account")) throw ParseError(where + ".account: missing field");
        auto acct = account_from_json(j.at("account"), where + ".account");
        if (name == "create_user") return deception::CreateUser{std::move(acct)};
        return deception::PlantCreds{std::move(acct)};
    }
    throw ParseError(where + ".action: unknown deception action '" + name + "'");
}

}  // namespace cyberirl
