#include "cyberirl/scenario.hpp"

#include "cyberirl/error.hpp"
#include "cyberirl/util.hpp"
#include "json_fields.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cyberirl {

using nlohmann::json;

std::size_t Scenario::num_decoys() const
{
    return static_cast<std::size_t>(
        std::count_if(hosts.begin(), hosts.end(), [](const HostSpec& h) { return h.is_decoy; }));
}

const HostSpec* Scenario::find_host(std::string_view id) const
{
    for (const auto& h : hosts)
        if (h.host_id == id) return &h;
    return nullptr;
}

const AccountSpec* Scenario::find_account(std::string_view username) const
{
    for (const auto& a : accounts)
        if (a.username == username) return &a;
    return nullptr;
}

bool Scenario::hbss_monitoring() const
{
    return std::any_of(deceptions.begin(), deceptions.end(), [](const DeceptionAction& d) {
        return std::holds_alternative<deception::MonitorHbss>(d);
    });
}

namespace {

bool is_dotted_quad(const std::string& ip)
{
    int parts = 0;
    std::size_t i = 0;
    while (i <= ip.size()) {
        std::size_t j = ip.find('.', i);
        if (j == std::string::npos) j = ip.size();
        const auto part = ip.substr(i, j - i);
        if (part.empty() || part.size() > 3) return false;
        if (!std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; }))
            return false;
        if (std::stoi(part) > 255) return false;
        ++parts;
        i = j + 1;
    }
    return parts == 4;
}

void check_probability(double p, const std::string& where)
{
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(where + ": probability must lie in [0, 1]");
}

std::string host_ref(std::size_t i)
{
    return "hosts[" + std::to_string(i) + "]";
}

}  // namespace

void validate(const Scenario& s)
{
    if (s.hosts.empty()) throw ValidationError("hosts: scenario requires >=1 host");

    std::set<std::string> ids, ips, usernames;
    for (const auto& a : s.accounts) {
        if (a.username.empty()) throw ValidationError("accounts.username: must not be empty");
        if (!usernames.insert(a.username).second)
            throw ValidationError("accounts.username: duplicate username '" + a.username + "'");
    }

    for (std::size_t i = 0; i < s.hosts.size(); ++i) {
        const auto& h = s.hosts[i];
        const auto where = host_ref(i);
        if (h.host_id.empty()) throw ValidationError(where + ".host_id: must not be empty");
        if (!ids.insert(h.host_id).second)
            throw ValidationError(where + ".host_id: duplicate host_id '" + h.host_id + "'");
        if (!is_dotted_quad(h.ip_address))
            throw ValidationError(where + ".ip_address: '" + h.ip_address + "' is not a dotted quad");
        if (!ips.insert(h.ip_address).second)
            throw ValidationError(where + ".ip_address: duplicate address " + h.ip_address);
        if (!(h.value >= 0.0) || !std::isfinite(h.value))
            throw ValidationError(where + ".value: must be a finite non-negative number");
        if (!(h.response.slowdown >= 1.0) || !std::isfinite(h.response.slowdown))
            throw ValidationError(where + ".response.slowdown: must be >= 1");
        if (h.phantom && !h.is_decoy)
            throw ValidationError(where + ".phantom: phantom hosts must be decoys");
        if (h.phantom && !h.services.empty())
            throw ValidationError(where + ".services: phantom hosts carry no services");

        std::set<int> ports;
        for (std::size_t k = 0; k < h.services.size(); ++k) {
            const auto& svc = h.services[k];
            const auto sw = where + ".services[" + std::to_string(k) + "]";
            if (svc.port < 1 || svc.port > 65535)
                throw ValidationError(sw + ".port: must lie in 1..65535");
            if (!ports.insert(svc.port).second)
                throw ValidationError(sw + ".port: duplicate port " + std::to_string(svc.port));
        }
        for (const auto& acct : h.accounts)
            if (!usernames.count(acct))
                throw ValidationError(where + ".accounts: unknown account '" + acct + "'");
    }

    for (std::size_t i = 0; i < s.accounts.size(); ++i)
        for (const auto& host : s.accounts[i].planted_on)
            if (!ids.count(host))
                throw ValidationError("accounts[" + std::to_string(i) + "].planted_on: unknown host '" +
                                      host + "'");

    for (const auto& e : s.connectivity.entry)
        if (!ids.count(e)) throw ValidationError("connectivity.entry: unknown host '" + e + "'");
    for (const auto& [from, tos] : s.connectivity.links) {
        if (!ids.count(from)) throw ValidationError("connectivity.links: unknown host '" + from + "'");
        for (const auto& to : tos)
            if (!ids.count(to))
                throw ValidationError("connectivity.links." + from + ": unknown host '" + to + "'");
    }

    if (s.goal) {
        const auto* g = s.find_host(*s.goal);
        if (!g) throw ValidationError("goal: unknown host '" + *s.goal + "'");
        if (g->is_decoy) throw ValidationError("goal: goal host '" + *s.goal + "' must not be a decoy");
    }

    for (std::size_t k = 0; k < kNumActionKinds; ++k) {
        const auto kind = std::string(to_string(static_cast<ActionKind>(k)));
        check_probability(s.detection.ids[k], "detection.ids." + kind);
        check_probability(s.detection.hbss[k], "detection.hbss." + kind);
    }
    check_probability(s.detection.decoy, "detection.decoy");
    check_probability(s.dynamics.p_discover, "dynamics.p_discover");
    check_probability(s.dynamics.p_exploit, "dynamics.p_exploit");
    check_probability(s.dynamics.p_admin_exploit, "dynamics.p_admin_exploit");
    check_probability(s.dynamics.p_reset_success, "dynamics.p_reset_success");
    check_probability(s.dynamics.p_falsify_demote, "dynamics.p_falsify_demote");
}

namespace {

json probs_to_json(const std::array<double, kNumActionKinds>& p)
{
    json j = json::object();
    for (std::size_t k = 0; k < kNumActionKinds; ++k)
        j[std::string(to_string(static_cast<ActionKind>(k)))] = p[k];
    return j;
}

void probs_from_json(const json& j, std::array<double, kNumActionKinds>& out, const std::string& where)
{
    detail::require_object(j, where);
    for (const auto& [key, value] : j.items()) {
        ActionKind kind;
        try {
            kind = action_kind_from_string(key);
        } catch (const ParseError&) {
            throw ParseError(where + "." + key + ": unknown action kind");
        }
        if (!value.is_number()) throw ParseError(where + "." + key + ": expected a number");
        out[static_cast<std::size_t>(kind)] = value.get<double>();
    }
}

json scenario_to_json(const Scenario& s)
{
    json hosts = json::array();
    for (const auto& h : s.hosts) hosts.push_back(to_json(h));
    json accounts = json::array();
    for (const auto& a : s.accounts) accounts.push_back(to_json(a));
    json deceptions = json::array();
    for (const auto& d : s.deceptions) deceptions.push_back(to_json(d));
    json links = json::object();
    for (const auto& [from, tos] : s.connectivity.links) links[from] = tos;

    return {
        {"format_version", kScenarioFormatVersion},
        {"goal", s.goal ? json(*s.goal) : json(nullptr)},
        {"hosts", hosts},
        {"accounts", accounts},
        {"connectivity", {{"entry", s.connectivity.entry}, {"links", links}}},
        {"detection",
         {{"ids", probs_to_json(s.detection.ids)},
          {"hbss", probs_to_json(s.detection.hbss)},
          {"decoy", s.detection.decoy}}},
        {"dynamics",
         {{"p_discover", s.dynamics.p_discover},
          {"p_exploit", s.dynamics.p_exploit},
          {"p_admin_exploit", s.dynamics.p_admin_exploit},
          {"p_reset_success", s.dynamics.p_reset_success},
          {"p_falsify_demote", s.dynamics.p_falsify_demote}}},
        {"deceptions", deceptions},
        {"metadata", {{"num_hosts", s.num_hosts()}, {"num_decoys", s.num_decoys()}}},
    };
}

Scenario scenario_from_json(const json& j)
{
    const std::string root = "scenario";
    detail::require_object(j, root);
    if (j.contains("format_version")) {
        const auto v = detail::get_int(j, "format_version", root);
        if (v != kScenarioFormatVersion)
            throw ParseError("scenario.format_version: unsupported version " + std::to_string(v));
    }

    Scenario s;
    if (!j.contains("hosts")) throw ParseError("scenario.hosts: missing field");
    detail::require_array(j.at("hosts"), "hosts");
    for (std::size_t i = 0; i < j.at("hosts").size(); ++i)
        s.hosts.push_back(host_from_json(j.at("hosts")[i], host_ref(i)));

    if (auto it = j.find("accounts"); it != j.end()) {
        detail::require_array(*it, "accounts");
        for (std::size_t i = 0; i < it->size(); ++i)
            s.accounts.push_back(account_from_json((*it)[i], "accounts[" + std::to_string(i) + "]"));
    }

    if (auto it = j.find("connectivity"); it != j.end()) {
        detail::require_object(*it, "connectivity");
        s.connectivity.entry = detail::get_string_list(*it, "entry", "connectivity");
        if (auto lt = it->find("links"); lt != it->end()) {
            detail::require_object(*lt, "connectivity.links");
            for (const auto& [from, tos] : lt->items())
                s.connectivity.links[from] = detail::get_string_list(*lt, from.c_str(), "connectivity.links");
        }
    }

    if (auto it = j.find("detection"); it != j.end()) {
        detail::require_object(*it, "detection");
        if (it->contains("ids")) probs_from_json(it->at("ids"), s.detection.ids, "detection.ids");
        if (it->contains("hbss")) probs_from_json(it->at("hbss"), s.detection.hbss, "detection.hbss");
        s.detection.decoy = detail::get_double(*it, "decoy", "detection", s.detection.decoy);
    }

    if (auto it = j.find("dynamics"); it != j.end()) {
        const std::string w = "dynamics";
        detail::require_object(*it, w);
        auto& d = s.dynamics;
        d.p_discover = detail::get_double(*it, "p_discover", w, d.p_discover);
        d.p_exploit = detail::get_double(*it, "p_exploit", w, d.p_exploit);
        d.p_admin_exploit = detail::get_double(*it, "p_admin_exploit", w, d.p_admin_exploit);
        d.p_reset_success = detail::get_double(*it, "p_reset_success", w, d.p_reset_success);
        d.p_falsify_demote = detail::get_double(*it, "p_falsify_demote", w, d.p_falsify_demote);
    }

    if (auto it = j.find("goal"); it != j.end() && !it->is_null()) {
        if (!it->is_string()) throw ParseError("scenario.goal: expected a string");
        s.goal = it->get<std::string>();
    }

    if (auto it = j.find("deceptions"); it != j.end()) {
        detail::require_array(*it, "deceptions");
        for (std::size_t i = 0; i < it->size(); ++i)
            s.deceptions.push_back(deception_from_json((*it)[i], "deceptions[" + std::to_string(i) + "]"));
    }
    // "metadata" is derived and recomputed on demand; any stored copy is ignored.
    return s;
}

}  // namespace

Scenario load_scenario(std::string_view document)
{
    json j;
    try {
        j = json::parse(document);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("scenario document is not valid JSON: ") + e.what());
    }
    Scenario s = scenario_from_json(j);
    validate(s);
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open scenario file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return load_scenario(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::string serialize(const Scenario& s)
{
    return scenario_to_json(s).dump(2) + "\n";
}

std::string scenario_hash(const Scenario& s)
{
    return content_hash(scenario_to_json(s).dump());
}

namespace {

HostSpec& require_host(Scenario& s, const std::string& id, std::string_view action)
{
    for (auto& h : s.hosts)
        if (h.host_id == id) return h;
    throw PreconditionError(std::string(action) + ": unknown target host '" + id + "'");
}

void require_unique_ip(const Scenario& s, const std::string& ip, std::string_view action)
{
    for (const auto& h : s.hosts)
        if (h.ip_address == ip)
            throw PreconditionError(std::string(action) + ": ip_address " + ip + " already in use");
}

std::string decoy_id_for(const std::string& prefix, const std::string& ip)
{
    std::string id = prefix + ip;
    std::replace(id.begin(), id.end(), '.', '_');
    return id;
}

void add_decoy_account(Scenario& s, AccountSpec acct, std::string_view action)
{
    acct.is_decoy = true;
    if (s.find_account(acct.username))
        throw PreconditionError(std::string(action) + ": username '" + acct.username + "' already exists");
    for (const auto& host : acct.planted_on) require_host(s, host, action);
    s.accounts.push_back(std::move(acct));
}

}  // namespace

Scenario apply_deception(const Scenario& input, const DeceptionAction& d)
{
    if (std::holds_alternative<deception::DoNothing>(d)) return input;

    Scenario s = input;
    const auto name = deception_name(d);
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, deception::LaunchDecoy>) {
                HostSpec decoy = v.decoy;
                decoy.is_decoy = true;
                decoy.phantom = false;
                require_unique_ip(s, decoy.ip_address, name);
                if (decoy.host_id.empty()) decoy.host_id = decoy_id_for("decoy_", decoy.ip_address);
                if (s.find_host(decoy.host_id))
                    throw PreconditionError(std::string(name) + ": host_id '" + decoy.host_id +
                                            "' already exists");
                s.hosts.push_back(std::move(decoy));
            } else if constexpr (std::is_same_v<T, deception::PingResponder>) {
                require_unique_ip(s, v.address, name);
                HostSpec phantom;
                phantom.host_id = decoy_id_for("phantom_", v.address);
                phantom.ip_address = v.address;
                phantom.is_decoy = true;
                phantom.phantom = true;
                phantom.purpose = "ping responder";
                s.hosts.push_back(std::move(phantom));
            } else if constexpr (std::is_same_v<T, deception::Portspoof>) {
                auto& h = require_host(s, v.host, name);
                if (h.phantom)
                    throw PreconditionError(std::string(name) + ": '" + v.host + "' is a phantom and carries no services");
                for (auto svc : v.services) {
                    svc.spoofed = true;
                    for (const auto& existing : h.services)
                        if (existing.port == svc.port)
                            throw PreconditionError(std::string(name) + ": port " +
                                                    std::to_string(svc.port) + " already open on '" +
                                                    v.host + "'");
                    h.services.push_back(std::move(svc));
                }
            } else if constexpr (std::is_same_v<T, deception::FalsifyResponse>) {
                require_host(s, v.host, name).response.falsify_response = true;
            } else if constexpr (std::is_same_v<T, deception::TrafficControl>) {
                if (!(v.slowdown >= 1.0))
                    throw PreconditionError(std::string(name) + ": slowdown must be >= 1");
                require_host(s, v.host, name).response.slowdown = v.slowdown;
            } else if constexpr (std::is_same_v<T, deception::TcpReset>) {
                require_host(s, v.host, name).response.tcp_reset = true;
            } else if constexpr (std::is_same_v<T, deception::CreateUser>) {
                add_decoy_account(s, v.account, name);
            } else if constexpr (std::is_same_v<T, deception::PlantCreds>) {
                if (v.account.planted_on.empty())
                    throw PreconditionError(std::string(name) + ": planted_on must name at least one host");
                add_decoy_account(s, v.account, name);
            }
            // DoNothing, MonitorIds, MonitorHbss: no terrain change.
        },
        d);
    s.deceptions.push_back(d);
    validate(s);
    return s;
}

Scenario strip_deception(const Scenario& input)
{
    Scenario s;
    s.connectivity = {};
    s.detection = input.detection;
    s.dynamics = input.dynamics;
    s.goal = input.goal;

    std::set<std::string> kept_hosts, kept_accounts;
    for (const auto& a : input.accounts) {
        if (a.is_decoy) continue;
        kept_accounts.insert(a.username);
    }
    for (auto h : input.hosts) {
        if (h.is_decoy) continue;
        std::erase_if(h.services, [](const ServiceSpec& svc) { return svc.spoofed; });
        std::erase_if(h.accounts, [&](const std::string& u) { return !kept_accounts.count(u); });
        h.response = ResponseFlags{};
        kept_hosts.insert(h.host_id);
        s.hosts.push_back(std::move(h));
    }
    for (auto a : input.accounts) {
        if (a.is_decoy) continue;
        std::erase_if(a.planted_on, [&](const std::string& id) { return !kept_hosts.count(id); });
        s.accounts.push_back(std::move(a));
    }
    for (const auto& e : input.connectivity.entry)
        if (kept_hosts.count(e)) s.connectivity.entry.push_back(e);
    for (const auto& [from, tos] : input.connectivity.links) {
        if (!kept_hosts.count(from)) continue;
        std::vector<std::string> kept;
        for (const auto& to : tos)
            if (kept_hosts.count(to)) kept.push_back(to);
        s.connectivity.links[from] = std::move(kept);
    }
    for (const auto& d : input.deceptions)
        if (std::holds_alternative<deception::MonitorIds>(d) ||
            std::holds_alternative<deception::MonitorHbss>(d))
            s.deceptions.push_back(d);
    validate(s);
    return s;
}

}  // namespace cyberirl
