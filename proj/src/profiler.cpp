#include "cyberirl/profiler.hpp"

#include "cyberirl/error.hpp"
#include "cyberirl/util.hpp"

#include <algorithm>
#include <cmath>

namespace cyberirl {

using nlohmann::json;

namespace {

// Level the attacker must hold before it can issue the action.
KnowledgeLevel implied_level(ActionKind k)
{
    switch (k) {
    case ActionKind::active_recon:
        return KnowledgeLevel::discovered;
    case ActionKind::vuln_search:
    case ActionKind::explore_service:
        return KnowledgeLevel::scanned;
    case ActionKind::exploit:
        return KnowledgeLevel::vuln_known;
    case ActionKind::actions_target:
        return KnowledgeLevel::foothold;
    default:
        return KnowledgeLevel::unknown;
    }
}

double severity_weight(Severity s, const ProfilerConfig& cfg)
{
    switch (s) {
    case Severity::low:
        return cfg.weight_low;
    case Severity::medium:
        return cfg.weight_medium;
    case Severity::high:
        return cfg.weight_high;
    }
    return 0.0;
}

bool is_recon(ActionKind k)
{
    return k == ActionKind::passive_recon || k == ActionKind::active_recon || k == ActionKind::vuln_search ||
           k == ActionKind::explore_service;
}

bool has_decoy_alert(const TrajectoryRecord& r)
{
    return std::any_of(r.alerts.begin(), r.alerts.end(), [](const Alert& a) { return a.source == AlertSource::decoy; });
}

void check_chain(const Trajectory& t)
{
    for (std::size_t i = 0; i < t.records.size(); ++i) {
        if (t.records[i].step != i)
            throw PreconditionError("trajectory with seed " + std::to_string(t.seed) + " has step " +
                                    std::to_string(t.records[i].step) + " at position " + std::to_string(i));
        if (i > 0 && t.records[i].state_index != t.records[i - 1].next_state_index)
            throw PreconditionError("trajectory with seed " + std::to_string(t.seed) + " breaks chaining at step " +
                                    std::to_string(i));
    }
}

void accumulate(ProfileMetrics& m, const Trajectory& t, const ProfilerConfig& cfg)
{
    for (const auto& r : t.records) {
        if (targets_host(r.action.kind)) {
            auto& hi = m.target_interactions[r.action.host];
            ++hi.count;
            hi.max_level = std::max(hi.max_level, implied_level(r.action.kind));
        }
        m.attack_duration += r.wall_time_units;
        for (const auto& a : r.alerts) {
            ++m.alert_count;
            ++m.severity_histogram[static_cast<std::size_t>(a.severity)];
            m.weighted_alerts += severity_weight(a.severity, cfg);
        }
        if (!m.time_to_first_alert && !r.alerts.empty()) m.time_to_first_alert = m.attack_duration;
    }
    m.record_count += t.records.size();
    m.stealth = m.record_count == 0
                    ? 1.0
                    : 1.0 - std::min(1.0, m.weighted_alerts / static_cast<double>(m.record_count));
}

}  // namespace

std::string_view to_string(Sentience s)
{
    switch (s) {
    case Sentience::likely_scripted:
        return "likely_scripted";
    case Sentience::likely_human:
        return "likely_human";
    case Sentience::unknown:
        break;
    }
    return "unknown";
}

ProfileMetrics compute_metrics(const Trajectory& t, const ProfilerConfig& cfg)
{
    if (t.records.empty()) throw PreconditionError("cannot profile an empty trajectory");
    check_chain(t);
    ProfileMetrics m;
    accumulate(m, t, cfg);
    return m;
}

InferredProfile infer_profile(const TrajectorySet& ts, const Scenario& scenario, const ProfilerConfig& cfg)
{
    if (ts.trajectories.empty()) throw PreconditionError("empty trajectory set");
    InferredProfile p;

    // Sentience: spread of the wall-time gaps between consecutive non-idle actions.
    std::vector<double> gaps;
    for (const auto& t : ts.trajectories) {
        double clock = 0.0;
        std::optional<double> last;
        for (const auto& r : t.records) {
            if (r.action.kind != ActionKind::do_nothing) {
                if (last) gaps.push_back(clock - *last);
                last = clock;
            }
            clock += r.wall_time_units;
        }
    }
    if (gaps.size() + 1 >= cfg.min_actions_for_timing) {
        double mean = 0.0;
        for (double g : gaps) mean += g;
        mean /= static_cast<double>(gaps.size());
        double var = 0.0;
        for (double g : gaps) var += (g - mean) * (g - mean);
        var /= static_cast<double>(gaps.size());
        p.timing_cv = mean > 0.0 ? std::sqrt(var) / mean : 0.0;
        p.sentience = p.timing_cv < cfg.scripted_cv ? Sentience::likely_scripted : Sentience::likely_human;
    }

    // Expertise: alerts per objective action, inverted into [0, 1].
    std::size_t alerts = 0, successes = 0, records = 0, recon = 0;
    std::map<std::string, std::size_t> interactions;
    std::map<std::string, std::size_t> bigrams;
    double first_exploit_fraction = 0.0;
    std::size_t exploiting = 0;
    for (const auto& t : ts.trajectories) {
        for (std::size_t i = 0; i < t.records.size(); ++i) {
            const auto& r = t.records[i];
            alerts += r.alerts.size();
            if (r.action.kind == ActionKind::actions_target) ++successes;
            if (is_recon(r.action.kind)) ++recon;
            if (targets_host(r.action.kind)) ++interactions[r.action.host];
            if (i > 0)
                ++bigrams[std::string(to_string(t.records[i - 1].action.kind)) + ">" +
                          std::string(to_string(r.action.kind))];
        }
        records += t.records.size();
        for (std::size_t i = 0; i < t.records.size(); ++i)
            if (t.records[i].action.kind == ActionKind::exploit) {
                first_exploit_fraction += static_cast<double>(i) / static_cast<double>(t.records.size());
                ++exploiting;
                break;
            }
    }
    p.expertise = successes == 0 ? 0.0
                                 : 1.0 / (1.0 + static_cast<double>(alerts) / static_cast<double>(successes));

    // Deception awareness: decoy alerts mark decoy contact.
    std::size_t pre_hits = 0, pre_steps = 0, post_hits = 0, post_steps = 0;
    bool contact_seen = false;
    for (const auto& t : ts.trajectories) {
        std::optional<std::size_t> contact;
        for (std::size_t i = 0; i < t.records.size(); ++i)
            if (has_decoy_alert(t.records[i])) {
                contact = i;
                break;
            }
        if (!contact) continue;
        contact_seen = true;
        pre_hits += 1;
        pre_steps += *contact + 1;
        for (std::size_t i = *contact + 1; i < t.records.size(); ++i) {
            ++post_steps;
            if (has_decoy_alert(t.records[i])) ++post_hits;
        }
    }
    if (scenario.num_decoys() > 0 && contact_seen && post_steps > 0) {
        p.pre_contact_decoy_rate = static_cast<double>(pre_hits) / static_cast<double>(pre_steps);
        p.post_contact_decoy_rate = static_cast<double>(post_hits) / static_cast<double>(post_steps);
        p.deception_aware = p.post_contact_decoy_rate < cfg.aware_ratio * p.pre_contact_decoy_rate;
        p.deception_aware_low_confidence = false;
    }

    // Goal estimate: interaction-weighted advertised value, ties to the lexicographically first host.
    double best = -1.0, max_value = 0.0;
    for (const auto& h : scenario.hosts) max_value = std::max(max_value, h.value);
    for (const auto& [host, count] : interactions) {
        const HostSpec* spec = scenario.find_host(host);
        const double score = static_cast<double>(count) * (spec ? spec->value : 0.0);
        if (score > best) {
            best = score;
            p.goal_estimate = host;
        }
    }

    const double mean_stealth = [&] {
        double acc = 0.0;
        for (const auto& t : ts.trajectories) {
            if (t.records.empty()) {
                acc += 1.0;
                continue;
            }
            acc += compute_metrics(t, cfg).stealth;
        }
        return acc / static_cast<double>(ts.trajectories.size());
    }();
    if (records > 0 && static_cast<double>(recon) / static_cast<double>(records) > cfg.recon_heavy_fraction)
        p.strategy_tags.emplace_back("recon-heavy");
    if (exploiting > 0 && first_exploit_fraction / static_cast<double>(exploiting) < cfg.exploit_early_fraction)
        p.strategy_tags.emplace_back("exploit-early");
    if (contact_seen) p.strategy_tags.emplace_back("decoy-engaged");
    if (mean_stealth > cfg.stealthy_threshold) p.strategy_tags.emplace_back("stealthy");
    if (successes > 0) p.strategy_tags.emplace_back("objective-reached");

    double goal_value = 0.0;
    if (p.goal_estimate)
        if (const HostSpec* spec = scenario.find_host(*p.goal_estimate)) goal_value = spec->value;
    const double stake = max_value > 0.0 ? goal_value / max_value : 0.0;
    p.threat_level = 1 + static_cast<int>(std::floor(4.0 * p.expertise * stake + 1e-12));
    p.threat_level = std::clamp(p.threat_level, 1, 5);

    std::string ngram_text;
    for (const auto& [gram, count] : bigrams) ngram_text += gram + "=" + std::to_string(count) + ";";
    p.fingerprint = content_hash(ngram_text);
    return p;
}

ProfileReport build_report(const TrajectorySet& ts, const Scenario& scenario, const ProfilerConfig& cfg)
{
    if (ts.trajectories.empty()) throw PreconditionError("empty trajectory set");
    ProfileReport rep;
    double stealth = 0.0, duration = 0.0;
    for (const auto& t : ts.trajectories) {
        const auto m = compute_metrics(t, cfg);
        stealth += m.stealth;
        duration += m.attack_duration;
        accumulate(rep.aggregate, t, cfg);
    }
    // The aggregate's first-alert time is only meaningful per trajectory.
    rep.aggregate.time_to_first_alert.reset();
    const auto n = static_cast<double>(ts.trajectories.size());
    rep.mean_stealth = stealth / n;
    rep.mean_duration = duration / n;
    rep.inferred = infer_profile(ts, scenario, cfg);
    return rep;
}

json to_json(const ProfileMetrics& m)
{
    json interactions = json::object();
    for (const auto& [host, hi] : m.target_interactions)
        interactions[host] = {{"count", hi.count}, {"max_level", to_string(hi.max_level)}};
    json out = {{"target_interactions", std::move(interactions)},
                {"record_count", m.record_count},
                {"attack_duration", m.attack_duration},
                {"alert_count", m.alert_count},
                {"severity_histogram",
                 {{"low", m.severity_histogram[0]}, {"medium", m.severity_histogram[1]}, {"high", m.severity_histogram[2]}}},
                {"weighted_alerts", m.weighted_alerts},
                {"stealth", m.stealth}};
    out["time_to_first_alert"] = m.time_to_first_alert ? json(*m.time_to_first_alert) : json(nullptr);
    return out;
}

json to_json(const InferredProfile& p)
{
    return {{"sentience", to_string(p.sentience)},
            {"timing_cv", p.timing_cv},
            {"expertise", p.expertise},
            {"deception_aware", p.deception_aware},
            {"deception_aware_low_confidence", p.deception_aware_low_confidence},
            {"pre_contact_decoy_rate", p.pre_contact_decoy_rate},
            {"post_contact_decoy_rate", p.post_contact_decoy_rate},
            {"goal_estimate", p.goal_estimate ? json(*p.goal_estimate) : json(nullptr)},
            {"strategy_tags", p.strategy_tags},
            {"threat_level", p.threat_level},
            {"fingerprint", p.fingerprint},
            {"emotional_state", p.emotional_state},
            {"num_attackers", p.num_attackers}};
}

json to_json(const ProfilerConfig& c)
{
    return {{"severity_weights", {{"low", c.weight_low}, {"medium", c.weight_medium}, {"high", c.weight_high}}},
            {"scripted_cv", c.scripted_cv},
            {"min_actions_for_timing", c.min_actions_for_timing},
            {"aware_ratio", c.aware_ratio},
            {"recon_heavy_fraction", c.recon_heavy_fraction},
            {"exploit_early_fraction", c.exploit_early_fraction},
            {"stealthy_threshold", c.stealthy_threshold}};
}

}  // namespace cyberirl
