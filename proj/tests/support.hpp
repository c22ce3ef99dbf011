#pragma once

#include "cyberirl/error.hpp"
#include "cyberirl/irl.hpp"
#include "cyberirl/mdp.hpp"
#include "cyberirl/profiler.hpp"
#include "cyberirl/scenario.hpp"
#include "cyberirl/sim.hpp"
#include "cyberirl/softrl.hpp"
#include "cyberirl/tabular.hpp"
#include "cyberirl/util.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using namespace cyberirl;

inline std::string data_path(const std::string& name)
{
    return std::string(CYBERIRL_DATA_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name)
{
    return std::string(CYBERIRL_GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct ShippedPsi {
    RewardParams psi;
    double gamma = 0.95;
    double temperature = 1.0;
};

/// Reads the reward parameter document without going through the CLI.
inline ShippedPsi load_psi_star()
{
    const auto doc = nlohmann::json::parse(read_file(data_path("psi_star.json")));
    ShippedPsi out;
    for (auto name : feature_names()) out.psi.psi.push_back(doc.at("psi").at(std::string(name)).get<double>());
    out.gamma = doc.at("gamma").get<double>();
    out.temperature = doc.at("temperature").get<double>();
    return out;
}

inline SoftViOptions solver(double gamma, double temperature, double tol = 1e-10)
{
    SoftViOptions o;
    o.gamma = gamma;
    o.temperature = temperature;
    o.tol = tol;
    o.sweep = Sweep::gauss_seidel_reverse;
    return o;
}

struct RandomMdp {
    TabularMdp mdp;
    FeatureTable features;
};

/// Random finite MDP with 2..max_states states, 1..max_actions actions per state, 1..3
/// successors per action and dense features in [-1, 1].
inline RandomMdp random_mdp(std::uint64_t seed, std::size_t max_states = 20, std::size_t max_actions = 5,
                            std::size_t dim = 4)
{
    SplitMix64 rng(seed);
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(rng.uniform() * static_cast<double>(hi - lo + 1));
    };
    RandomMdp out;
    const std::size_t n = pick(2, max_states);
    for (std::size_t s = 0; s < n; ++s) {
        out.mdp.add_state();
        const std::size_t k = pick(1, max_actions);
        for (std::size_t a = 0; a < k; ++a) {
            const std::size_t m = pick(1, 3);
            std::vector<Outcome> outs;
            double total = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                const double w = 0.1 + rng.uniform();
                outs.push_back({static_cast<std::uint32_t>(pick(0, n - 1)), w});
                total += w;
            }
            double acc = 0.0;
            for (std::size_t j = 0; j + 1 < m; ++j) {
                outs[j].prob /= total;
                acc += outs[j].prob;
            }
            outs.back().prob = 1.0 - acc;
            out.mdp.add_action(outs);
        }
    }
    out.mdp.finalize();
    out.features = FeatureTable(dim, out.mdp.num_slots());
    for (std::size_t slot = 0; slot < out.mdp.num_slots(); ++slot)
        for (double& f : out.features.row(slot)) f = 2.0 * rng.uniform() - 1.0;
    return out;
}

inline std::vector<double> random_vector(std::uint64_t seed, std::size_t n, double scale = 1.0)
{
    SplitMix64 rng(seed);
    std::vector<double> v(n);
    for (double& x : v) x = scale * (2.0 * rng.uniform() - 1.0);
    return v;
}

/// Samples slot trajectories from `policy` on a tabular MDP.
inline std::vector<std::vector<std::size_t>> sample_slots(const TabularMdp& mdp, const Policy& policy,
                                                          std::size_t n, std::size_t length, std::uint64_t seed)
{
    SplitMix64 rng(seed);
    std::vector<std::vector<std::size_t>> demos;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::size_t> demo;
        std::size_t s = mdp.initial_state();
        for (std::size_t t = 0; t < length; ++t) {
            double u = rng.uniform(), acc = 0.0;
            std::size_t slot = mdp.slot_end(s) - 1;
            for (std::size_t j = mdp.slot_begin(s); j < mdp.slot_end(s); ++j) {
                acc += policy.probs[j];
                if (u < acc) {
                    slot = j;
                    break;
                }
            }
            demo.push_back(slot);
            u = rng.uniform();
            acc = 0.0;
            const auto outs = mdp.outcomes(slot);
            std::size_t next = outs.back().next;
            for (const auto& o : outs) {
                acc += o.prob;
                if (u < acc) {
                    next = o.next;
                    break;
                }
            }
            s = next;
        }
        demos.push_back(std::move(demo));
    }
    return demos;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline double max_abs(std::span<const double> a)
{
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

/// Smallest scenario the model accepts: one real host reachable from outside.
inline Scenario one_host_scenario()
{
    Scenario s;
    HostSpec h;
    h.host_id = "h1";
    h.ip_address = "10.0.0.1";
    h.value = 5.0;
    h.services.push_back({"http", "1.0", 80, VulnSpec{"CVE-0000-0001", true}, false});
    s.hosts.push_back(h);
    s.connectivity.entry = {"h1"};
    s.goal = "h1";
    return s;
}

/// Two real hosts, both entry points, goal on the second.
inline Scenario two_host_scenario()
{
    Scenario s = one_host_scenario();
    HostSpec h;
    h.host_id = "h2";
    h.ip_address = "10.0.0.2";
    h.value = 7.0;
    h.services.push_back({"smb", "1", 445, VulnSpec{"MS17-010", false}, false});
    s.hosts.push_back(h);
    s.connectivity.entry = {"h1", "h2"};
    s.goal = "h2";
    return s;
}

/// The profiler report of the soft attacker on the shipped fixture, as stored in the golden file.
inline std::string six_host_profile_text(const AttackerMdp& mdp)
{
    const auto ps = load_psi_star();
    const auto pi = soft_policy(mdp.tabular(), mdp.features(), ps.psi.psi, solver(ps.gamma, ps.temperature));
    const auto batch = run_batch(mdp, pi, 200, 1, 60);
    const auto report = build_report(batch.set, mdp.scenario());
    const nlohmann::json doc = {{"aggregate", to_json(report.aggregate)},
                                {"mean_stealth", report.mean_stealth},
                                {"mean_duration", report.mean_duration},
                                {"inferred", to_json(report.inferred)}};
    return doc.dump(2) + "\n";
}

}  // namespace testing
