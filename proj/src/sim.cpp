#include "cyberirl/sim.hpp"

#include "cyberirl/error.hpp"
#include "cyberirl/util.hpp"
#include "json_fields.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace cyberirl {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kSourceNames = {"ids", "hbss", "decoy"};
constexpr std::array<std::string_view, 3> kSeverityNames = {"low", "medium", "high"};

std::size_t sample(std::span<const double> weights, double u)
{
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) return i;
    }
    // Rounding left u above the running total; take the last entry with mass.
    for (std::size_t i = weights.size(); i-- > 0;)
        if (weights[i] > 0.0) return i;
    return weights.size() - 1;
}

bool is_decoy_target(const AttackerModel& model, const AttackerAction& a)
{
    if (!targets_host(a.kind)) return false;
    const auto pos = model.space().host_position(a.host);
    return pos && model.hosts()[*pos].decoy;
}

double mean(const std::vector<double>& xs)
{
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs)
{
    if (xs.size() < 2) return 0.0;
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

std::string_view to_string(AlertSource s)
{
    return kSourceNames[static_cast<std::size_t>(s)];
}

std::string_view to_string(Severity s)
{
    return kSeverityNames[static_cast<std::size_t>(s)];
}

AlertSource alert_source_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kSourceNames.size(); ++i)
        if (kSourceNames[i] == s) return static_cast<AlertSource>(i);
    throw ParseError("unknown alert source '" + std::string(s) + "'");
}

Severity severity_from_string(std::string_view s)
{
    for (std::size_t i = 0; i < kSeverityNames.size(); ++i)
        if (kSeverityNames[i] == s) return static_cast<Severity>(i);
    throw ParseError("unknown severity '" + std::string(s) + "'");
}

Severity ids_severity(ActionKind k)
{
    switch (k) {
    case ActionKind::vuln_search:
        return Severity::medium;
    case ActionKind::exploit:
    case ActionKind::actions_target:
        return Severity::high;
    default:
        return Severity::low;
    }
}

DefenderRule parse_defender_rule(std::string_view text)
{
    const auto colon = text.find(':');
    const std::string_view response = text.substr(0, colon);
    DefenderRule rule;
    if (response == "tcp_reset" || response == "TCP_reset")
        rule.response = DefenderRule::Response::tcp_reset;
    else if (response == "traffic_control")
        rule.response = DefenderRule::Response::traffic_control;
    else if (response == "falsify_response")
        rule.response = DefenderRule::Response::falsify_response;
    else if (response == "launch_decoy")
        throw ParseError("defender rule '" + std::string(text) +
                         "': launch_decoy changes the host set and cannot be applied mid-episode");
    else
        throw ParseError("defender rule '" + std::string(text) +
                         "': expected tcp_reset, traffic_control or falsify_response");
    if (colon != std::string_view::npos) rule.trigger = severity_from_string(text.substr(colon + 1));
    return rule;
}

std::string to_string(const DefenderRule& rule)
{
    static constexpr std::array<std::string_view, 3> names = {"tcp_reset", "traffic_control", "falsify_response"};
    return std::string(names[static_cast<std::size_t>(rule.response)]) + ":" + std::string(to_string(rule.trigger));
}

// ---------------------------------------------------------------------------------------------
// Episodes

Trajectory run_episode(const AttackerMdp& mdp, const Policy& policy, const EpisodeOptions& options)
{
    if (options.horizon == 0) throw PreconditionError("horizon must be at least 1");
    if (policy.probs.size() != mdp.num_slots())
        throw PreconditionError("policy has " + std::to_string(policy.probs.size()) +
                                " entries but the scenario's MDP has " + std::to_string(mdp.num_slots()) +
                                " action slots");

    const TabularMdp& tab = mdp.tabular();
    // Swapped out when a reactive defender changes the terrain.
    std::unique_ptr<AttackerModel> reacted;
    const AttackerModel* model = &mdp.model();
    const auto& space = model->space();

    Trajectory t;
    t.scenario_ref = mdp.scenario_hash();
    t.seed = options.seed;

    StateIndex g = 0;
    for (std::size_t step = 0; step < options.horizon; ++step) {
        const AttackerState s = space.decode(g);

        SplitMix64 action_rng(derive_seed(options.seed, step, 0));
        AttackerAction action;
        if (const auto local = mdp.local_index(g)) {
            const auto b = tab.slot_begin(*local), e = tab.slot_end(*local);
            const auto pick = sample(std::span<const double>(policy.probs.data() + b, e - b), action_rng.uniform());
            action = mdp.action(b + pick);
        } else {
            const auto legal = model->legal_actions(s);
            const std::vector<double> w(legal.size(), 1.0 / static_cast<double>(legal.size()));
            action = legal[sample(w, action_rng.uniform())];
        }

        const auto dist = model->transition(s, action);
        SplitMix64 transition_rng(derive_seed(options.seed, step, 1));
        std::vector<double> w;
        w.reserve(dist.size());
        for (const auto& o : dist) w.push_back(o.prob);
        const StateIndex next = dist[sample(w, transition_rng.uniform())].next;

        TrajectoryRecord rec;
        rec.step = step;
        rec.state_index = g;
        rec.action = action;
        rec.next_state_index = next;
        rec.feature_vector = model->features(s, action, FeatureMode::attacker_visible);
        rec.wall_time_units = 1.0;

        if (targets_host(action.kind)) {
            const auto& host = model->hosts()[*space.host_position(action.host)];
            rec.wall_time_units = host.response.slowdown;
            const auto& det = model->scenario().detection;
            const auto k = static_cast<std::size_t>(action.kind);
            SplitMix64 alert_rng(derive_seed(options.seed, step, 2));
            if (host.decoy) {
                if (alert_rng.uniform() < det.decoy)
                    rec.alerts.push_back({step, AlertSource::decoy, Severity::medium, action.host, action.kind});
            } else {
                if (alert_rng.uniform() < det.ids[k])
                    rec.alerts.push_back({step, AlertSource::ids, ids_severity(action.kind), action.host, action.kind});
                if (model->scenario().hbss_monitoring() && alert_rng.uniform() < det.hbss[k])
                    rec.alerts.push_back({step, AlertSource::hbss, Severity::high, action.host, action.kind});
            }
        }

        if (options.defender && !reacted) {
            const auto& rule = *options.defender;
            for (const auto& alert : rec.alerts) {
                if (alert.source == AlertSource::decoy || alert.severity < rule.trigger) continue;
                DeceptionAction d;
                switch (rule.response) {
                case DefenderRule::Response::tcp_reset:
                    d = deception::TcpReset{alert.host_id};
                    break;
                case DefenderRule::Response::traffic_control:
                    d = deception::TrafficControl{alert.host_id, rule.slowdown};
                    break;
                case DefenderRule::Response::falsify_response:
                    d = deception::FalsifyResponse{alert.host_id};
                    break;
                }
                reacted = std::make_unique<AttackerModel>(apply_deception(model->scenario(), d));
                model = reacted.get();
                t.stationary = false;
                break;
            }
        }

        t.records.push_back(std::move(rec));
        g = next;
        if (space.decode(g).terminal) {
            t.terminated = true;
            break;
        }
    }
    return t;
}

std::size_t steps_to_first_real_foothold(const AttackerModel& model, const Trajectory& t, std::size_t horizon)
{
    const auto& space = model.space();
    for (const auto& rec : t.records) {
        const AttackerState s = space.decode(rec.next_state_index);
        for (std::size_t h = 0; h < s.per_host.size(); ++h)
            if (!model.hosts()[h].decoy && s.per_host[h] >= KnowledgeLevel::foothold) return rec.step + 1;
    }
    return horizon;
}

std::size_t real_host_ids_alerts(const AttackerModel& model, const Trajectory& t)
{
    std::size_t n = 0;
    for (const auto& rec : t.records)
        for (const auto& a : rec.alerts) {
            if (a.source != AlertSource::ids) continue;
            const auto pos = model.space().host_position(a.host_id);
            if (pos && !model.hosts()[*pos].decoy) ++n;
        }
    return n;
}

SummaryStats summarize(const AttackerModel& model, const TrajectorySet& ts, std::size_t horizon)
{
    SummaryStats st;
    st.episodes = ts.trajectories.size();
    st.num_hosts = model.scenario().num_hosts();
    st.num_decoys = model.scenario().num_decoys();
    if (st.episodes == 0) return st;

    std::vector<double> lengths, ids, hbss, decoy, real_ids, foothold, success;
    for (const auto& t : ts.trajectories) {
        lengths.push_back(static_cast<double>(t.records.size()));
        double n_ids = 0, n_hbss = 0, n_decoy = 0;
        for (const auto& rec : t.records) {
            if (is_decoy_target(model, rec.action)) ++st.decoy_interactions;
            for (const auto& a : rec.alerts) {
                switch (a.source) {
                case AlertSource::ids:
                    ++n_ids;
                    break;
                case AlertSource::hbss:
                    ++n_hbss;
                    break;
                case AlertSource::decoy:
                    ++n_decoy;
                    break;
                }
            }
        }
        ids.push_back(n_ids);
        hbss.push_back(n_hbss);
        decoy.push_back(n_decoy);
        real_ids.push_back(static_cast<double>(real_host_ids_alerts(model, t)));
        foothold.push_back(static_cast<double>(steps_to_first_real_foothold(model, t, horizon)));
        success.push_back(t.terminated ? 1.0 : 0.0);
    }
    st.mean_length = mean(lengths);
    st.mean_ids_alerts = mean(ids);
    st.mean_hbss_alerts = mean(hbss);
    st.mean_decoy_alerts = mean(decoy);
    st.mean_real_host_ids_alerts = mean(real_ids);
    st.se_real_host_ids_alerts = standard_error(real_ids);
    st.success_rate = mean(success);
    st.mean_steps_to_first_real_foothold = mean(foothold);
    st.se_steps_to_first_real_foothold = standard_error(foothold);
    return st;
}

Batch run_batch(const AttackerMdp& mdp, const Policy& policy, std::size_t n, std::uint64_t base_seed,
                std::size_t horizon, const std::optional<DefenderRule>& defender)
{
    if (n == 0) throw PreconditionError("batch needs at least one episode");
    Batch b;
    b.set.scenario_hash = mdp.scenario_hash();
    b.set.trajectories.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        b.set.trajectories.push_back(run_episode(mdp, policy, {base_seed + i, horizon, defender}));
    b.stats = summarize(mdp.model(), b.set, horizon);
    return b;
}

json to_json(const SummaryStats& s)
{
    return {
        {"episodes", s.episodes},
        {"num_hosts", s.num_hosts},
        {"num_decoys", s.num_decoys},
        {"mean_length", s.mean_length},
        {"mean_ids_alerts", s.mean_ids_alerts},
        {"mean_hbss_alerts", s.mean_hbss_alerts},
        {"mean_decoy_alerts", s.mean_decoy_alerts},
        {"mean_real_host_ids_alerts", s.mean_real_host_ids_alerts},
        {"se_real_host_ids_alerts", s.se_real_host_ids_alerts},
        {"decoy_interactions", s.decoy_interactions},
        {"success_rate", s.success_rate},
        {"mean_steps_to_first_real_foothold", s.mean_steps_to_first_real_foothold},
        {"se_steps_to_first_real_foothold", s.se_steps_to_first_real_foothold},
    };
}

// ---------------------------------------------------------------------------------------------
// Logs

namespace {

json alert_to_json(const Alert& a)
{
    return {{"step", a.step},
            {"source", to_string(a.source)},
            {"severity", to_string(a.severity)},
            {"host", a.host_id},
            {"action_kind", to_string(a.action_kind)}};
}

Alert alert_from_json(const json& j, const std::string& where)
{
    detail::require_object(j, where);
    Alert a;
    a.step = detail::get_uint(j, "step", where);
    a.source = alert_source_from_string(detail::get_string(j, "source", where));
    a.severity = severity_from_string(detail::get_string(j, "severity", where));
    a.host_id = detail::get_string(j, "host", where);
    a.action_kind = action_kind_from_string(detail::get_string(j, "action_kind", where));
    return a;
}

json record_to_json(const TrajectoryRecord& r)
{
    json alerts = json::array();
    for (const auto& a : r.alerts) alerts.push_back(alert_to_json(a));
    return {{"type", "record"},
            {"step", r.step},
            {"state", r.state_index},
            {"action", to_string(r.action)},
            {"next_state", r.next_state_index},
            {"features", r.feature_vector},
            {"alerts", std::move(alerts)},
            {"wall_time", r.wall_time_units}};
}

TrajectoryRecord record_from_json(const json& j, const std::string& where)
{
    TrajectoryRecord r;
    r.step = detail::get_uint(j, "step", where);
    r.state_index = detail::get_uint(j, "state", where);
    r.action = parse_attacker_action(detail::get_string(j, "action", where));
    r.next_state_index = detail::get_uint(j, "next_state", where);
    r.feature_vector = detail::get_double_list(j, "features", where);
    if (r.feature_vector.size() != kNumFeatures)
        throw ParseError(where + ".features: expected " + std::to_string(kNumFeatures) + " entries");
    const auto& alerts = detail::field(j, "alerts", where);
    detail::require_array(alerts, where + ".alerts");
    for (std::size_t i = 0; i < alerts.size(); ++i)
        r.alerts.push_back(alert_from_json(alerts[i], where + ".alerts[" + std::to_string(i) + "]"));
    r.wall_time_units = detail::get_double(j, "wall_time", where);
    return r;
}

}  // namespace

void write_log(const TrajectorySet& ts, std::ostream& out)
{
    json seeds = json::array();
    for (const auto& t : ts.trajectories) seeds.push_back(t.seed);
    const json header = {{"type", "header"},
                         {"format_version", kLogFormatVersion},
                         {"scenario_hash", ts.scenario_hash},
                         {"num_trajectories", ts.trajectories.size()},
                         {"seeds", std::move(seeds)},
                         {"provenance", ts.provenance}};
    out << header.dump() << '\n';
    for (const auto& t : ts.trajectories) {
        const json episode = {{"type", "episode"},
                              {"scenario_ref", t.scenario_ref},
                              {"seed", t.seed},
                              {"terminated", t.terminated},
                              {"stationary", t.stationary},
                              {"num_records", t.records.size()}};
        out << episode.dump() << '\n';
        for (const auto& r : t.records) out << record_to_json(r).dump() << '\n';
    }
}

std::string write_log(const TrajectorySet& ts)
{
    std::ostringstream out;
    write_log(ts, out);
    return out.str();
}

TrajectorySet read_log(std::istream& in)
{
    TrajectorySet ts;
    std::string line;
    std::size_t line_no = 0;
    bool have_header = false;
    std::size_t expected_trajectories = 0;
    std::size_t expected_records = 0;

    auto at = [&] { return "log line " + std::to_string(line_no); };
    auto close_episode = [&] {
        if (ts.trajectories.empty()) return;
        const auto& t = ts.trajectories.back();
        if (t.records.size() != expected_records)
            throw ValidationError(at() + ": episode with seed " + std::to_string(t.seed) + " declares " +
                                  std::to_string(expected_records) + " records but has " +
                                  std::to_string(t.records.size()));
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(at() + ": corrupt line: " + e.what());
        }
        try {
            detail::require_object(j, at());
            const std::string type = detail::get_string(j, "type", at());
            if (!have_header) {
                if (type != "header") throw ParseError(at() + ": expected the header object first");
                const auto version = detail::get_int(j, "format_version", at());
                if (version != kLogFormatVersion)
                    throw ParseError(at() + ": unsupported format_version " + std::to_string(version));
                ts.scenario_hash = detail::get_string(j, "scenario_hash", at());
                expected_trajectories = detail::get_uint(j, "num_trajectories", at());
                if (j.contains("provenance")) ts.provenance = j["provenance"];
                have_header = true;
            } else if (type == "episode") {
                close_episode();
                Trajectory t;
                t.scenario_ref = detail::get_string(j, "scenario_ref", at());
                if (t.scenario_ref != ts.scenario_hash)
                    throw ValidationError(at() + ": scenario hash " + t.scenario_ref +
                                          " does not match the header's " + ts.scenario_hash);
                t.seed = detail::get_uint(j, "seed", at());
                t.terminated = detail::get_bool(j, "terminated", at());
                t.stationary = detail::get_bool(j, "stationary", at());
                expected_records = detail::get_uint(j, "num_records", at());
                ts.trajectories.push_back(std::move(t));
            } else if (type == "record") {
                if (ts.trajectories.empty()) throw ParseError(at() + ": record before any episode");
                auto& t = ts.trajectories.back();
                TrajectoryRecord r = record_from_json(j, at());
                if (r.step != t.records.size())
                    throw ValidationError(at() + ": expected step " + std::to_string(t.records.size()) + ", got " +
                                          std::to_string(r.step));
                const StateIndex expected_state = t.records.empty() ? 0 : t.records.back().next_state_index;
                if (r.state_index != expected_state)
                    throw ValidationError(at() + ": broken state chaining at step " + std::to_string(r.step) +
                                          ": state " + std::to_string(r.state_index) + " but the previous step led to " +
                                          std::to_string(expected_state));
                t.records.push_back(std::move(r));
            } else {
                throw ParseError(at() + ": unknown object type '" + type + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const ValidationError&) {
            throw;
        } catch (const Error& e) {
            throw ParseError(at() + ": " + e.what());
        }
    }
    if (!have_header) throw ParseError("trajectory log is empty: missing header");
    close_episode();
    if (ts.trajectories.size() != expected_trajectories)
        throw ValidationError("trajectory log declares " + std::to_string(expected_trajectories) +
                              " trajectories but contains " + std::to_string(ts.trajectories.size()));
    return ts;
}

TrajectorySet read_log(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return read_log(in);
}

TrajectorySet read_log_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open trajectory log '" + path + "'");
    return read_log(in);
}

}  // namespace cyberirl
