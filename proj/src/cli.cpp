#include "cyberirl/cli.hpp"

#include "cyberirl/error.hpp"
#include "cyberirl/irl.hpp"
#include "cyberirl/profiler.hpp"
#include "cyberirl/scenario.hpp"
#include "cyberirl/sim.hpp"
#include "cyberirl/util.hpp"
#include "json_fields.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace cyberirl {

using nlohmann::json;

namespace {

constexpr int kDocumentFormatVersion = 1;

std::string default_data_path(const char* name)
{
    return (std::filesystem::path(CYBERIRL_DATA_DIR) / name).string();
}

struct Globals {
    std::string scenario = default_data_path("six_host.scn");
    std::uint64_t seed = 0;
    std::string out;
    int format_version = kDocumentFormatVersion;
};

// ---------------------------------------------------------------------------------------------
// Documents

json read_json_file(const std::string& path, const char* what)
{
    std::ifstream in(path);
    if (!in) throw ParseError(std::string("cannot open ") + what + " '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + " '" + path + "': " + e.what());
    }
}

void write_text(const std::string& path, const std::string& text)
{
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
}

void write_json(const std::string& path, const json& doc)
{
    write_text(path, doc.dump(2) + "\n");
}

json psi_to_json(const RewardParams& p)
{
    json j = json::object();
    const auto& names = feature_names();
    for (std::size_t i = 0; i < kNumFeatures; ++i) j[std::string(names[i])] = p.psi[i];
    return j;
}

struct PsiDocument {
    RewardParams psi;
    std::optional<double> temperature;
    std::optional<double> gamma;
    std::optional<std::string> scenario_hash;
};

PsiDocument read_psi(const std::string& path)
{
    const json doc = read_json_file(path, "reward parameter file");
    const std::string where = path;
    detail::require_object(doc, where);
    const auto& psi = detail::field(doc, "psi", where);
    detail::require_object(psi, where + ".psi");
    PsiDocument out;
    for (const auto name : feature_names())
        out.psi.psi.push_back(detail::get_double(psi, std::string(name).c_str(), where + ".psi"));
    if (psi.size() != kNumFeatures) throw ParseError(where + ".psi: unknown feature name");
    if (doc.contains("temperature")) out.temperature = detail::get_double(doc, "temperature", where);
    if (doc.contains("gamma")) out.gamma = detail::get_double(doc, "gamma", where);
    if (doc.contains("scenario_hash")) out.scenario_hash = detail::get_string(doc, "scenario_hash", where);
    return out;
}

json document_header(const char* kind, const std::string& hash, const json& config)
{
    return {{"format_version", kDocumentFormatVersion}, {"kind", kind}, {"scenario_hash", hash}, {"config", config}};
}

Scenario load_variant(const std::string& path, bool no_deception)
{
    Scenario s = load_scenario_file(path);
    return no_deception ? strip_deception(s) : s;
}

void require_hash(const std::string& what, const std::string& got, const std::string& expected)
{
    if (got != expected)
        throw ValidationError("scenario hash mismatch: " + what + " has " + got + " but the scenario is " + expected);
}

// ---------------------------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::size_t episodes = 100;
    std::size_t horizon = 60;
    std::string defender_rule;
    bool no_deception = false;
    std::string psi = default_data_path("psi_star.json");
    std::optional<double> temperature;
    std::optional<double> gamma;
    std::string policy = "soft";
    std::string stats;
};

int simulate(const Globals& g, const SimulateArgs& a, std::ostream& out)
{
    const Scenario scenario = load_variant(g.scenario, a.no_deception);
    const AttackerMdp mdp(scenario);
    const PsiDocument psi = read_psi(a.psi);
    SoftViOptions o;
    o.gamma = a.gamma.value_or(psi.gamma.value_or(0.95));
    o.temperature = a.temperature.value_or(psi.temperature.value_or(1.0));
    o.sweep = Sweep::gauss_seidel_reverse;

    Policy pi;
    if (a.policy == "soft")
        pi = soft_policy(mdp.tabular(), mdp.features(), psi.psi.psi, o);
    else if (a.policy == "greedy")
        pi = optimal_policy(mdp.tabular(), mdp.features(), psi.psi.psi, o);
    else if (a.policy == "uniform")
        pi = uniform_policy(mdp.tabular());
    else
        throw PreconditionError("unknown policy '" + a.policy + "' (expected soft, greedy or uniform)");

    std::optional<DefenderRule> rule;
    if (!a.defender_rule.empty()) rule = parse_defender_rule(a.defender_rule);

    const json config = {{"command", "simulate"},
                         {"scenario", g.scenario},
                         {"no_deception", a.no_deception},
                         {"episodes", a.episodes},
                         {"seed", g.seed},
                         {"horizon", a.horizon},
                         {"policy", a.policy},
                         {"psi", psi_to_json(psi.psi)},
                         {"gamma", o.gamma},
                         {"temperature", o.temperature},
                         {"defender_rule", rule ? json(to_string(*rule)) : json(nullptr)}};

    Batch batch = run_batch(mdp, pi, a.episodes, g.seed, a.horizon, rule);
    batch.set.provenance = config;

    const std::string log_path = g.out.empty() ? "trajectories.jsonl" : g.out;
    write_text(log_path, write_log(batch.set));
    json stats = document_header("summary_stats", mdp.scenario_hash(), config);
    stats["stats"] = to_json(batch.stats);
    write_json(a.stats.empty() ? log_path + ".stats.json" : a.stats, stats);

    out << "wrote " << a.episodes << " episodes to " << log_path << " (scenario " << mdp.scenario_hash()
        << ", success rate " << format_double(batch.stats.success_rate) << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------
// irl-fit

struct FitArgs {
    std::string log;
    bool no_deception = false;
    IrlConfig cfg;
    std::optional<double> temperature;
    std::optional<double> gamma;
    std::optional<std::size_t> horizon;
    std::string init = "zeros";
};

int irl_fit_command(const Globals& g, FitArgs a, std::ostream& out)
{
    const Scenario scenario = load_variant(g.scenario, a.no_deception);
    const AttackerMdp mdp(scenario);
    const TrajectorySet ts = read_log_file(a.log);
    if (ts.trajectories.empty()) throw PreconditionError("empty trajectory set");
    require_hash("log '" + a.log + "'", ts.scenario_hash, mdp.scenario_hash());

    // Unless overridden, fit with the discount, temperature and horizon the data was generated with.
    auto from_log = [&](const char* key) -> std::optional<json> {
        if (ts.provenance.is_object() && ts.provenance.contains(key) && ts.provenance[key].is_number())
            return ts.provenance[key];
        return std::nullopt;
    };
    a.cfg.gamma = a.gamma ? *a.gamma : from_log("gamma") ? from_log("gamma")->get<double>() : a.cfg.gamma;
    a.cfg.temperature =
        a.temperature ? *a.temperature : from_log("temperature") ? from_log("temperature")->get<double>() : a.cfg.temperature;
    a.cfg.horizon = a.horizon ? *a.horizon : from_log("horizon") ? from_log("horizon")->get<std::size_t>() : a.cfg.horizon;
    if (a.init == "zeros")
        a.cfg.init = IrlConfig::Init::zeros;
    else if (a.init == "seeded_uniform")
        a.cfg.init = IrlConfig::Init::seeded_uniform;
    else
        throw PreconditionError("unknown init '" + a.init + "' (expected zeros or seeded_uniform)");
    a.cfg.init_seed = g.seed;

    const json config = {{"command", "irl-fit"},
                         {"scenario", g.scenario},
                         {"no_deception", a.no_deception},
                         {"log", a.log},
                         {"learning_rate", a.cfg.learning_rate},
                         {"max_epochs", a.cfg.max_epochs},
                         {"grad_tol", a.cfg.grad_tol},
                         {"l2_reg", a.cfg.l2_reg},
                         {"horizon", a.cfg.horizon},
                         {"gamma", a.cfg.gamma},
                         {"temperature", a.cfg.temperature},
                         {"init", a.init},
                         {"seed", g.seed}};

    const IrlResult res = irl_fit(mdp, ts, a.cfg);

    json doc = document_header("reward_params", mdp.scenario_hash(), config);
    doc["psi"] = psi_to_json(res.psi_hat);
    doc["gamma"] = a.cfg.gamma;
    doc["temperature"] = a.cfg.temperature;
    doc["log_likelihood_curve"] = res.log_likelihood_curve;
    doc["grad_norm_final"] = res.grad_norm_final;
    doc["converged"] = res.converged;
    doc["epochs_run"] = res.epochs_run;
    doc["empirical_feature_expectations"] = res.empirical;
    doc["model_feature_expectations"] = res.model;
    const std::string path = g.out.empty() ? "params.json" : g.out;
    write_json(path, doc);
    out << "fitted " << res.epochs_run << " epochs (" << (res.converged ? "converged" : "not converged")
        << ", max-norm gradient " << format_double(res.grad_norm_final) << "); wrote " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------
// eval

struct EvalArgs {
    std::string psi_true = default_data_path("psi_star.json");
    std::string psi_hat;
    bool no_deception = false;
    std::optional<double> gamma;
    std::optional<double> temperature;
};

int eval_command(const Globals& g, const EvalArgs& a, std::ostream& out)
{
    const Scenario scenario = load_variant(g.scenario, a.no_deception);
    const AttackerMdp mdp(scenario);
    const PsiDocument truth = read_psi(a.psi_true);
    const PsiDocument hat = read_psi(a.psi_hat.empty() ? a.psi_true : a.psi_hat);
    if (hat.scenario_hash) require_hash("'" + a.psi_hat + "'", *hat.scenario_hash, mdp.scenario_hash());
    const double gamma = a.gamma.value_or(hat.gamma.value_or(truth.gamma.value_or(0.95)));
    SoftViOptions o;
    o.gamma = gamma;
    o.temperature = a.temperature.value_or(hat.temperature.value_or(truth.temperature.value_or(1.0)));
    o.sweep = Sweep::gauss_seidel_reverse;

    const double e = evd(mdp, truth.psi, hat.psi, gamma);
    const double v_star = optimal_value(mdp, truth.psi, gamma);
    const Policy own = soft_policy(mdp.tabular(), mdp.features(), hat.psi.psi, o);
    Policy idle;
    idle.probs.assign(mdp.num_slots(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) idle.probs[mdp.tabular().slot_begin(s)] = 1.0;

    const json config = {{"command", "eval"},
                         {"scenario", g.scenario},
                         {"no_deception", a.no_deception},
                         {"psi_true", a.psi_true},
                         {"psi_hat", a.psi_hat.empty() ? a.psi_true : a.psi_hat},
                         {"gamma", gamma},
                         {"temperature", o.temperature}};
    json doc = document_header("evaluation", mdp.scenario_hash(), config);
    doc["evd"] = e;
    doc["optimal_value"] = v_star;
    doc["evd_fraction"] = v_star != 0.0 ? e / std::abs(v_star) : 0.0;
    doc["counterfactual"] = {
        {"own_policy_ground_truth", counterfactual_evaluate(mdp, hat.psi, own, gamma, FeatureMode::ground_truth)},
        {"own_policy_attacker_visible", counterfactual_evaluate(mdp, hat.psi, own, gamma, FeatureMode::attacker_visible)},
        {"do_nothing_ground_truth", counterfactual_evaluate(mdp, hat.psi, idle, gamma, FeatureMode::ground_truth)},
    };
    doc["defender_value"] = -doc["counterfactual"]["own_policy_ground_truth"].get<double>();
    if (!g.out.empty()) write_json(g.out, doc);
    out << "EVD " << format_double(e) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------
// profile

struct ProfileArgs {
    std::string log;
    bool no_deception = false;
};

json profile_document(const Scenario& scenario, const std::string& hash, const TrajectorySet& ts, const json& config)
{
    const ProfilerConfig pcfg;
    const ProfileReport rep = build_report(ts, scenario, pcfg);
    json doc = document_header("profile", hash, config);
    doc["profiler_config"] = to_json(pcfg);
    doc["ground_truth_activity"] = to_json(rep.aggregate);
    doc["ground_truth_activity"]["mean_stealth"] = rep.mean_stealth;
    doc["ground_truth_activity"]["mean_attack_duration"] = rep.mean_duration;
    doc["ground_truth_activity"]["trajectories"] = ts.trajectories.size();
    doc["inferred"] = to_json(rep.inferred);
    return doc;
}

int profile_command(const Globals& g, const ProfileArgs& a, std::ostream& out)
{
    const Scenario scenario = load_variant(g.scenario, a.no_deception);
    const std::string hash = scenario_hash(scenario);
    const TrajectorySet ts = read_log_file(a.log);
    require_hash("log '" + a.log + "'", ts.scenario_hash, hash);
    const json config = {{"command", "profile"}, {"scenario", g.scenario}, {"no_deception", a.no_deception}, {"log", a.log}};
    const json doc = profile_document(scenario, hash, ts, config);
    const std::string path = g.out.empty() ? "profile.json" : g.out;
    write_json(path, doc);
    out << "wrote profile of " << ts.trajectories.size() << " trajectories to " << path << "\n";
    return 0;
}

// ---------------------------------------------------------------------------------------------
// report

struct ReportArgs {
    std::string present_log;
    std::string absent_log;
    std::string absent_scenario;  // default: the deception-stripped --scenario
    std::string params;
    std::optional<std::size_t> horizon;
};

struct VariantResult {
    json row;
    std::map<std::size_t, std::size_t> alert_histogram;
};

VariantResult evaluate_variant(const char* name, const Scenario& scenario, const TrajectorySet& ts,
                               const PsiDocument& psi, std::size_t horizon)
{
    const AttackerMdp mdp(scenario);
    const SummaryStats st = summarize(mdp.model(), ts, horizon);
    SoftViOptions o;
    o.gamma = psi.gamma.value_or(0.95);
    o.temperature = psi.temperature.value_or(1.0);
    o.sweep = Sweep::gauss_seidel_reverse;
    const Policy own = soft_policy(mdp.tabular(), mdp.features(), psi.psi.psi, o);

    // Agreement of the fitted policy with the logged behaviour: empirical action frequencies per
    // visited state.
    const auto demos = to_slot_trajectories(mdp, ts, true);
    Policy empirical;
    empirical.probs.assign(mdp.num_slots(), 0.0);
    std::vector<double> visits(mdp.num_states(), 0.0);
    for (const auto& d : demos)
        for (auto slot : d) {
            empirical.probs[slot] += 1.0;
            visits[mdp.tabular().state_of(slot)] += 1.0;
        }
    for (std::size_t slot = 0; slot < mdp.num_slots(); ++slot) {
        const auto s = mdp.tabular().state_of(slot);
        empirical.probs[slot] = visits[s] > 0.0 ? empirical.probs[slot] / visits[s]
                                                : 1.0 / static_cast<double>(mdp.tabular().num_actions(s));
    }
    const auto states = visited_states(mdp.tabular(), demos);

    VariantResult out;
    out.row = {{"variant", name},
               {"scenario_hash", mdp.scenario_hash()},
               {"num_hosts", st.num_hosts},
               {"num_decoys", st.num_decoys},
               {"episodes", st.episodes},
               {"mean_real_host_ids_alerts", st.mean_real_host_ids_alerts},
               {"se_real_host_ids_alerts", st.se_real_host_ids_alerts},
               {"mean_decoy_alerts", st.mean_decoy_alerts},
               {"mean_steps_to_first_real_foothold", st.mean_steps_to_first_real_foothold},
               {"se_steps_to_first_real_foothold", st.se_steps_to_first_real_foothold},
               {"success_rate", st.success_rate},
               {"attacker_value", counterfactual_evaluate(mdp, psi.psi, own, o.gamma, FeatureMode::ground_truth)},
               {"policy_agreement", policy_agreement(mdp.tabular(), own, empirical, states)}};
    for (const auto& t : ts.trajectories) ++out.alert_histogram[real_host_ids_alerts(mdp.model(), t)];
    return out;
}

std::string histogram_series(const std::map<std::size_t, std::size_t>& h)
{
    std::string s = "# real_host_ids_alerts\tepisodes\n";
    for (const auto& [k, n] : h) s += std::to_string(k) + "\t" + std::to_string(n) + "\n";
    return s;
}

int report_command(const Globals& g, const ReportArgs& a, std::ostream& out)
{
    const Scenario present = load_scenario_file(g.scenario);
    const Scenario absent = a.absent_scenario.empty() ? strip_deception(present) : load_scenario_file(a.absent_scenario);
    const TrajectorySet present_ts = read_log_file(a.present_log);
    const TrajectorySet absent_ts = read_log_file(a.absent_log);
    require_hash("log '" + a.present_log + "'", present_ts.scenario_hash, scenario_hash(present));
    require_hash("log '" + a.absent_log + "'", absent_ts.scenario_hash, scenario_hash(absent));
    const PsiDocument psi = read_psi(a.params);
    if (psi.scenario_hash) require_hash("'" + a.params + "'", *psi.scenario_hash, scenario_hash(present));

    auto horizon_of = [&](const TrajectorySet& ts) -> std::size_t {
        if (a.horizon) return *a.horizon;
        if (ts.provenance.is_object() && ts.provenance.contains("horizon") && ts.provenance["horizon"].is_number())
            return ts.provenance["horizon"].get<std::size_t>();
        std::size_t h = 1;
        for (const auto& t : ts.trajectories) h = std::max(h, t.records.size());
        return h;
    };

    const auto p = evaluate_variant("deception_present", present, present_ts, psi, horizon_of(present_ts));
    const auto q = evaluate_variant("deception_absent", absent, absent_ts, psi, horizon_of(absent_ts));

    const json config = {{"command", "report"},
                         {"scenario", g.scenario},
                         {"absent_scenario", a.absent_scenario.empty() ? json("stripped") : json(a.absent_scenario)},
                         {"present_log", a.present_log},
                         {"absent_log", a.absent_log},
                         {"params", a.params}};
    json doc = document_header("comparison_report", scenario_hash(present), config);
    doc["rows"] = {p.row, q.row};
    const double present_alerts = p.row["mean_real_host_ids_alerts"].get<double>();
    const double absent_alerts = q.row["mean_real_host_ids_alerts"].get<double>();
    doc["real_host_ids_alert_ratio_absent_over_present"] = present_alerts > 0.0 ? json(absent_alerts / present_alerts) : json(nullptr);
    doc["fewer_real_alerts_with_deception"] = present_alerts < absent_alerts;

    const std::filesystem::path dir = g.out.empty() ? "report" : g.out;
    write_json((dir / "report.json").string(), doc);

    std::string curve = "# epoch\tlog_likelihood\n";
    const json params_doc = read_json_file(a.params, "reward parameter file");
    if (params_doc.contains("log_likelihood_curve") && params_doc["log_likelihood_curve"].is_array()) {
        std::size_t i = 0;
        for (const auto& v : params_doc["log_likelihood_curve"])
            curve += std::to_string(i++) + "\t" + format_double(v.get<double>()) + "\n";
    }
    write_text((dir / "likelihood_curve.tsv").string(), curve);
    write_text((dir / "alerts_present.tsv").string(), histogram_series(p.alert_histogram));
    write_text((dir / "alerts_absent.tsv").string(), histogram_series(q.alert_histogram));

    out << "variant             real_ids_alerts  steps_to_foothold  success  attacker_value  agreement\n";
    for (const auto* row : {&p.row, &q.row}) {
        std::ostringstream line;
        line.setf(std::ios::fixed);
        line.precision(3);
        line << std::left << std::setw(20) << (*row)["variant"].get<std::string>() << std::right << std::setw(15)
             << (*row)["mean_real_host_ids_alerts"].get<double>() << std::setw(19)
             << (*row)["mean_steps_to_first_real_foothold"].get<double>() << std::setw(9)
             << (*row)["success_rate"].get<double>() << std::setw(16) << (*row)["attacker_value"].get<double>()
             << std::setw(11) << (*row)["policy_agreement"].get<double>();
        out << line.str() << "\n";
    }
    return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Deception-aware attacker simulation and reward recovery"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--scenario", g.scenario, "Scenario document")->capture_default_str();
    app.add_option("--seed", g.seed, "Base seed")->capture_default_str();
    app.add_option("--out", g.out, "Output path (a directory for report)");
    app.add_option("--format-version", g.format_version, "Expected document format version")->capture_default_str();

    SimulateArgs sim;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run seeded attacker episodes and write a trajectory log");
    simulate_cmd->add_option("--episodes", sim.episodes)->capture_default_str()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--horizon", sim.horizon)->capture_default_str()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--defender-rule", sim.defender_rule, "e.g. tcp_reset:medium");
    simulate_cmd->add_flag("--no-deception", sim.no_deception, "Strip all deception from the scenario");
    simulate_cmd->add_option("--psi", sim.psi, "Attacker reward parameters")->capture_default_str();
    simulate_cmd->add_option("--temperature", sim.temperature);
    simulate_cmd->add_option("--gamma", sim.gamma);
    simulate_cmd->add_option("--policy", sim.policy, "soft, greedy or uniform")->capture_default_str();
    simulate_cmd->add_option("--stats", sim.stats, "Summary statistics document (default LOG.stats.json)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("irl-fit", "Recover reward parameters from a trajectory log");
    fit_cmd->add_option("--log", fit.log)->required();
    fit_cmd->add_flag("--no-deception", fit.no_deception);
    fit_cmd->add_option("--lr", fit.cfg.learning_rate)->capture_default_str();
    fit_cmd->add_option("--epochs", fit.cfg.max_epochs)->capture_default_str();
    fit_cmd->add_option("--tol", fit.cfg.grad_tol)->capture_default_str();
    fit_cmd->add_option("--l2", fit.cfg.l2_reg)->capture_default_str();
    fit_cmd->add_option("--horizon", fit.horizon, "Forward-pass horizon (default: the log's)");
    fit_cmd->add_option("--gamma", fit.gamma, "Discount (default: the log's)");
    fit_cmd->add_option("--temperature", fit.temperature, "Temperature (default: the log's)");
    fit_cmd->add_option("--init", fit.init, "zeros or seeded_uniform")->capture_default_str();
    fit_cmd->add_flag("--include-non-stationary", fit.cfg.include_non_stationary);

    EvalArgs ev;
    auto* eval_cmd = app.add_subcommand("eval", "Expected value difference and counterfactual values");
    eval_cmd->add_option("--psi-true", ev.psi_true)->capture_default_str();
    eval_cmd->add_option("--psi-hat", ev.psi_hat, "Fitted parameters (default: --psi-true)");
    eval_cmd->add_flag("--no-deception", ev.no_deception);
    eval_cmd->add_option("--gamma", ev.gamma);
    eval_cmd->add_option("--temperature", ev.temperature);

    ProfileArgs prof;
    auto* profile_cmd = app.add_subcommand("profile", "Attacker profile from a trajectory log");
    profile_cmd->add_option("--log", prof.log)->required();
    profile_cmd->add_flag("--no-deception", prof.no_deception);

    ReportArgs rep;
    auto* report_cmd = app.add_subcommand("report", "Compare deception-present and deception-absent runs");
    report_cmd->add_option("--present-log", rep.present_log)->required();
    report_cmd->add_option("--absent-log", rep.absent_log)->required();
    report_cmd->add_option("--absent-scenario", rep.absent_scenario);
    report_cmd->add_option("--params", rep.params)->required();
    report_cmd->add_option("--horizon", rep.horizon, "Censoring horizon (default: the logs')");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (g.format_version != kDocumentFormatVersion)
            throw PreconditionError("unsupported --format-version " + std::to_string(g.format_version) +
                                    " (this build reads and writes version " +
                                    std::to_string(kDocumentFormatVersion) + ")");
        if (*simulate_cmd) return simulate(g, sim, out);
        if (*fit_cmd) return irl_fit_command(g, fit, out);
        if (*eval_cmd) return eval_command(g, ev, out);
        if (*profile_cmd) return profile_command(g, prof, out);
        if (*report_cmd) return report_command(g, rep, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

}  // namespace cyberirl
