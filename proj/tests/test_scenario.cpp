#include "support.hpp"

#include "doctest.h"

using namespace testing;

namespace {

Scenario six_host() { return load_scenario_file(data_path("six_host.scn")); }

HostSpec linux_decoy(const std::string& ip)
{
    HostSpec h;
    h.ip_address = ip;
    h.os = OsKind::linux;
    return h;
}

}  // namespace

TEST_CASE("shipped fixture counts hosts and decoys")
{
    const auto s = six_host();
    CHECK(s.num_hosts() == 6);
    CHECK(s.num_decoys() == 2);
    CHECK(s.goal == std::optional<std::string>("db01"));
}

TEST_CASE("empty host list is rejected")
{
    auto doc = nlohmann::json::parse(serialize(six_host()));
    doc["hosts"] = nlohmann::json::array();
    doc["accounts"] = nlohmann::json::array();
    doc["connectivity"] = {{"entry", nlohmann::json::array()}, {"links", nlohmann::json::object()}};
    doc.erase("goal");
    CHECK_THROWS_WITH_AS(load_scenario(doc.dump()), doctest::Contains("requires >=1 host"), ValidationError);
}

TEST_CASE("duplicate ip address names the field")
{
    auto doc = nlohmann::json::parse(serialize(six_host()));
    doc["hosts"][1]["ip_address"] = doc["hosts"][0]["ip_address"];
    CHECK_THROWS_WITH_AS(load_scenario(doc.dump()), doctest::Contains("ip_address"), ValidationError);
}

TEST_CASE("dangling references name the field")
{
    auto doc = nlohmann::json::parse(serialize(six_host()));
    doc["connectivity"]["entry"].push_back("nowhere");
    CHECK_THROWS_WITH_AS(load_scenario(doc.dump()), doctest::Contains("connectivity.entry"), ValidationError);

    doc = nlohmann::json::parse(serialize(six_host()));
    doc["goal"] = "hr_db";
    CHECK_THROWS_WITH_AS(load_scenario(doc.dump()), doctest::Contains("goal"), ValidationError);
}

TEST_CASE("malformed documents raise parse errors")
{
    CHECK_THROWS_AS(load_scenario("{not json"), ParseError);
    CHECK_THROWS_AS(load_scenario("{}"), ParseError);
    CHECK_THROWS_WITH_AS(load_scenario_file("no/such/file.scn"), doctest::Contains("no/such/file.scn"), ParseError);
}

TEST_CASE("stale metadata is ignored and recomputed")
{
    auto doc = nlohmann::json::parse(serialize(six_host()));
    doc["metadata"] = {{"num_hosts", 99}, {"num_decoys", 42}};
    const auto s = load_scenario(doc.dump());
    CHECK(s.num_hosts() == 6);
    CHECK(serialize(s) == serialize(six_host()));
}

TEST_CASE("serialization round trips")
{
    const auto s = six_host();
    const auto text = serialize(s);
    CHECK(serialize(load_scenario(text)) == text);
    CHECK(load_scenario(text) == s);
    CHECK(scenario_hash(load_scenario(text)) == scenario_hash(s));
}

TEST_CASE("launch_decoy appends a decoy host")
{
    const auto s = six_host();
    const auto t = apply_deception(s, deception::LaunchDecoy{linux_decoy("10.0.0.99")});
    CHECK(t.num_decoys() == 3);
    CHECK(t.num_hosts() == 7);
    CHECK_THROWS_AS(apply_deception(s, deception::LaunchDecoy{linux_decoy("10.0.0.10")}), PreconditionError);
}

TEST_CASE("do_nothing is the identity")
{
    const auto s = six_host();
    CHECK(serialize(apply_deception(s, deception::DoNothing{})) == serialize(s));
}

TEST_CASE("portspoof adds a spoofed service and leaves the real vulnerabilities alone")
{
    const auto s = six_host();
    const auto before = AttackerModel(s).hosts();
    const auto t = apply_deception(s, deception::Portspoof{"fs01", {{"ssh", "OpenSSH", 22, std::nullopt, false}}});
    const auto* fs = t.find_host("fs01");
    REQUIRE(fs);
    CHECK(fs->services.size() == 2);
    CHECK(fs->services.back().spoofed);
    const auto after = AttackerModel(t).hosts();
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(before[i].real_vuln == after[i].real_vuln);
}

TEST_CASE("portspoof on a phantom address is rejected")
{
    const auto s = apply_deception(six_host(), deception::PingResponder{"10.0.0.77"});
    const auto& phantom = s.hosts.back().host_id;
    CHECK_THROWS_WITH_AS(apply_deception(s, deception::Portspoof{phantom, {{"ssh", "1", 22, std::nullopt, false}}}),
                         doctest::Contains("phantom"), PreconditionError);
}

TEST_CASE("apply_deception leaves its input untouched")
{
    const auto s = six_host();
    const auto text = serialize(s);
    (void)apply_deception(s, deception::TcpReset{"web01"});
    (void)apply_deception(s, deception::PingResponder{"10.0.0.77"});
    CHECK(serialize(s) == text);
}

TEST_CASE("unknown target host is a precondition error")
{
    CHECK_THROWS_WITH_AS(apply_deception(six_host(), deception::FalsifyResponse{"ghost"}),
                         doctest::Contains("ghost"), PreconditionError);
}

TEST_CASE("response flags land on the target host")
{
    auto s = apply_deception(six_host(), deception::TcpReset{"web01"});
    s = apply_deception(s, deception::TrafficControl{"ws01", 3.0});
    CHECK(s.find_host("web01")->response.tcp_reset);
    CHECK(s.find_host("ws01")->response.slowdown == 3.0);
    CHECK_THROWS_AS(apply_deception(s, deception::TrafficControl{"ws01", 0.5}), PreconditionError);
}

TEST_CASE("stripping the shipped fixture yields the shipped deception-absent variant")
{
    const auto absent = load_scenario_file(data_path("six_host_no_deception.scn"));
    CHECK(serialize(strip_deception(six_host())) == serialize(absent));
    CHECK(absent.num_decoys() == 0);
    CHECK(strip_deception(absent) == absent);
}

TEST_CASE("scenario hash is the canonical content hash")
{
    const auto s = six_host();
    CHECK(scenario_hash(s).size() == 16);
    CHECK(scenario_hash(s) != scenario_hash(strip_deception(s)));
}

TEST_CASE("content hash matches FNV-1a reference values")
{
    CHECK(content_hash("") == "cbf29ce484222325");
    CHECK(content_hash("a") == "af63dc4c8601ec8c");
    CHECK(content_hash("foobar") == "85944171f73967e8");
}
