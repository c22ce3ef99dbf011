#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cyberirl {

enum class OsKind { windows, linux };
enum class DecoyFidelity { low_interaction, high_interaction };
enum class PrivLevel { user, admin };

struct VulnSpec {
    std::string id;
    /// Reachable without a login, so explore_service can find it.
    bool unauthenticated = false;

    bool operator==(const VulnSpec&) const = default;
};

struct ServiceSpec {
    std::string name;
    std::string version;
    int port = 0;
    std::optional<VulnSpec> vulnerability;
    /// Presented by portspoof. A spoofed vulnerability is advertised but never exploitable.
    bool spoofed = false;

    bool operator==(const ServiceSpec&) const = default;
};

/// Per-host response manipulation set by falsify_response, traffic_control and TCP_reset.
struct ResponseFlags {
    bool falsify_response = false;
    bool tcp_reset = false;
    double slowdown = 1.0;

    bool operator==(const ResponseFlags&) const = default;
};

struct HostSpec {
    std::string host_id;
    std::string ip_address;
    OsKind os = OsKind::linux;
    std::string os_version;
    bool is_decoy = false;
    DecoyFidelity decoy_fidelity = DecoyFidelity::low_interaction;
    /// Zero-service address answered by a ping responder. Always a decoy.
    bool phantom = false;
    std::vector<ServiceSpec> services;
    std::vector<std::string> accounts;
    std::string purpose;
    double value = 0.0;
    ResponseFlags response;

    bool operator==(const HostSpec&) const = default;
};

struct AccountSpec {
    std::string username;
    PrivLevel priv_level = PrivLevel::user;
    bool is_decoy = false;
    std::vector<std::string> planted_on;
    // Carried through load/save; no procedure reads them.
    std::string password;
    std::string pwd_hash;

    bool operator==(const AccountSpec&) const = default;
};

}  // namespace cyberirl
