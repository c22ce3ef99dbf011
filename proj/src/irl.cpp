#include "cyberirl/irl.hpp"

#include "cyberirl/error.hpp"
#include "cyberirl/util.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cyberirl {

namespace {

SoftViOptions solver_options(const IrlConfig& cfg)
{
    SoftViOptions o;
    o.gamma = cfg.gamma;
    o.temperature = cfg.temperature;
    o.tol = cfg.solver_tol;
    o.sweep = cfg.sweep;
    return o;
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void require_dim(const FeatureTable& features, std::span<const double> psi)
{
    if (psi.size() != features.dim())
        throw PreconditionError("psi has dimension " + std::to_string(psi.size()) + " but features have " +
                                std::to_string(features.dim()));
}

}  // namespace

void IrlConfig::validate() const
{
    if (!(learning_rate > 0.0)) throw PreconditionError("learning_rate must be positive");
    if (max_epochs == 0) throw PreconditionError("max_epochs must be positive");
    if (!(grad_tol > 0.0)) throw PreconditionError("grad_tol must be positive");
    if (!(l2_reg >= 0.0)) throw PreconditionError("l2_reg must be non-negative");
    if (horizon == 0) throw PreconditionError("horizon must be positive");
    if (!(gamma > 0.0 && gamma < 1.0)) throw PreconditionError("gamma must lie in (0, 1)");
    if (!(temperature > 0.0)) throw PreconditionError("temperature must be positive");
    if (!(solver_tol > 0.0)) throw PreconditionError("solver_tol must be positive");
}

// ---------------------------------------------------------------------------------------------
// Feature expectations

FeatureVector empirical_feature_expectations(const TrajectorySet& ts, double gamma, bool include_non_stationary)
{
    if (ts.trajectories.empty()) throw PreconditionError("empty trajectory set");
    FeatureVector acc(kNumFeatures, 0.0);
    std::size_t used = 0;
    for (const auto& t : ts.trajectories) {
        if (t.scenario_ref != ts.scenario_hash)
            throw PreconditionError("mixed scenario hashes in trajectory set: " + t.scenario_ref + " vs " +
                                    ts.scenario_hash);
        if (!t.stationary && !include_non_stationary) continue;
        double discount = 1.0;
        for (const auto& r : t.records) {
            if (r.feature_vector.size() != kNumFeatures)
                throw PreconditionError("record feature vector has the wrong dimension");
            for (std::size_t i = 0; i < kNumFeatures; ++i) acc[i] += discount * r.feature_vector[i];
            discount *= gamma;
        }
        ++used;
    }
    if (used == 0) throw PreconditionError("no stationary trajectories in the set");
    for (double& x : acc) x /= static_cast<double>(used);
    return acc;
}

FeatureVector empirical_feature_expectations(const FeatureTable& features, std::span<const SlotTrajectory> demos,
                                             double gamma)
{
    if (demos.empty()) throw PreconditionError("empty trajectory set");
    FeatureVector acc(features.dim(), 0.0);
    for (const auto& demo : demos) {
        double discount = 1.0;
        for (auto slot : demo) {
            const auto f = features.row(slot);
            for (std::size_t i = 0; i < f.size(); ++i) acc[i] += discount * f[i];
            discount *= gamma;
        }
    }
    for (double& x : acc) x /= static_cast<double>(demos.size());
    return acc;
}

std::vector<double> expected_visitation(const TabularMdp& mdp, const Policy& policy, std::size_t horizon,
                                        double gamma)
{
    if (horizon == 0) throw PreconditionError("horizon must be at least 1");
    check_policy(mdp, policy);
    const std::size_t n = mdp.num_states();
    std::vector<double> mass(mdp.num_slots(), 0.0);
    std::vector<double> d(n, 0.0), next(n, 0.0);
    d[mdp.initial_state()] = 1.0;
    double discount = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        const bool last = t + 1 == horizon;
        if (!last) std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (d[s] == 0.0) continue;
            for (auto a = mdp.slot_begin(s); a < mdp.slot_end(s); ++a) {
                const double m = d[s] * policy.probs[a];
                if (m == 0.0) continue;
                mass[a] += discount * m;
                if (!last)
                    for (const auto& o : mdp.outcomes(a)) next[o.next] += m * o.prob;
            }
        }
        d.swap(next);
        discount *= gamma;
    }
    return mass;
}

std::vector<std::vector<double>> state_marginals(const TabularMdp& mdp, const Policy& policy, std::size_t horizon)
{
    check_policy(mdp, policy);
    const std::size_t n = mdp.num_states();
    std::vector<std::vector<double>> out;
    std::vector<double> d(n, 0.0);
    d[mdp.initial_state()] = 1.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        out.push_back(d);
        std::vector<double> next(n, 0.0);
        for (std::size_t s = 0; s < n; ++s) {
            if (d[s] == 0.0) continue;
            for (auto a = mdp.slot_begin(s); a < mdp.slot_end(s); ++a)
                for (const auto& o : mdp.outcomes(a)) next[o.next] += d[s] * policy.probs[a] * o.prob;
        }
        d.swap(next);
    }
    return out;
}

FeatureVector feature_expectations(const FeatureTable& features, std::span<const double> slot_mass)
{
    FeatureVector acc(features.dim(), 0.0);
    for (std::size_t a = 0; a < slot_mass.size(); ++a) {
        if (slot_mass[a] == 0.0) continue;
        const auto f = features.row(a);
        for (std::size_t i = 0; i < f.size(); ++i) acc[i] += slot_mass[a] * f[i];
    }
    return acc;
}

std::vector<SlotTrajectory> to_slot_trajectories(const AttackerMdp& mdp, const TrajectorySet& ts,
                                                 bool include_non_stationary)
{
    std::vector<SlotTrajectory> out;
    for (const auto& t : ts.trajectories) {
        if (t.scenario_ref != mdp.scenario_hash())
            throw PreconditionError("trajectory scenario hash " + t.scenario_ref + " does not match the MDP's " +
                                    mdp.scenario_hash());
        if (!t.stationary && !include_non_stationary) continue;
        SlotTrajectory demo;
        demo.reserve(t.records.size());
        for (const auto& r : t.records) {
            const auto local = mdp.local_index(r.state_index);
            const auto slot = local ? mdp.slot_for(*local, r.action) : std::nullopt;
            if (!slot)
                throw PreconditionError("seed " + std::to_string(t.seed) + " step " + std::to_string(r.step) +
                                        ": (state, action) is not part of the compiled MDP");
            demo.push_back(*slot);
        }
        out.push_back(std::move(demo));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Likelihood

Policy soft_policy(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                   const SoftViOptions& options)
{
    require_dim(features, psi);
    const auto r = features.rewards(psi);
    return boltzmann_policy(mdp, soft_value_iteration(mdp, r, options));
}

Policy optimal_policy(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                      const SoftViOptions& options)
{
    require_dim(features, psi);
    const auto r = features.rewards(psi);
    return greedy_policy(mdp, value_iteration(mdp, r, options));
}

double log_likelihood(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                      std::span<const SlotTrajectory> demos, const SoftViOptions& options)
{
    require_dim(features, psi);
    const auto sv = soft_value_iteration(mdp, features.rewards(psi), options);
    if (!sv.converged) throw PreconditionError("soft value iteration did not converge");
    std::vector<double> norm(mdp.num_states());
    for (std::size_t s = 0; s < mdp.num_states(); ++s)
        norm[s] = soft_max(std::span(sv.Q).subspan(mdp.slot_begin(s), mdp.slot_end(s) - mdp.slot_begin(s)),
                           options.temperature);
    double ll = 0.0;
    for (const auto& demo : demos)
        for (auto slot : demo) ll += (sv.Q[slot] - norm[mdp.state_of(slot)]) / options.temperature;
    return ll;
}

double log_likelihood(const AttackerMdp& mdp, const RewardParams& psi, const TrajectorySet& ts, double gamma,
                      double temperature)
{
    const auto demos = to_slot_trajectories(mdp, ts);
    SoftViOptions o;
    o.gamma = gamma;
    o.temperature = temperature;
    o.tol = 1e-10;
    o.sweep = Sweep::gauss_seidel_reverse;
    return log_likelihood(mdp.tabular(), mdp.features(), psi.psi, demos, o);
}

std::vector<double> log_likelihood_gradient(const TabularMdp& mdp, const FeatureTable& features,
                                            std::span<const double> psi, std::span<const SlotTrajectory> demos,
                                            const SoftViOptions& options)
{
    require_dim(features, psi);
    const auto sv = soft_value_iteration(mdp, features.rewards(psi), options);
    if (!sv.converged) throw PreconditionError("soft value iteration did not converge");
    const auto pi = boltzmann_policy(mdp, sv);
    const std::size_t dim = features.dim();

    // Phi_i = dV/dpsi_i is the value of pi under the reward f_i.
    std::vector<std::vector<double>> phi(dim);
    std::vector<double> fi(mdp.num_slots());
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t a = 0; a < mdp.num_slots(); ++a) fi[a] = features.row(a)[i];
        const auto pv = evaluate_policy(mdp, fi, pi, options.gamma, options.tol, options.max_iter, options.sweep);
        phi[i] = pv.V;
    }

    // d log pi(a|s) = (dQ(s,a) - Phi(s)) / T with dQ(s,a) = f(s,a) + gamma E[Phi(s')].
    std::vector<double> g(dim, 0.0);
    for (const auto& demo : demos)
        for (auto slot : demo) {
            const auto s = mdp.state_of(slot);
            const auto f = features.row(slot);
            for (std::size_t i = 0; i < dim; ++i) {
                double next = 0.0;
                for (const auto& o : mdp.outcomes(slot)) next += o.prob * phi[i][o.next];
                g[i] += (f[i] + options.gamma * next - phi[i][s]) / options.temperature;
            }
        }
    return g;
}

ObjectiveValue maxent_objective(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                                std::span<const double> empirical, const IrlConfig& cfg,
                                std::vector<double>* warm_start)
{
    require_dim(features, psi);
    if (empirical.size() != psi.size()) throw PreconditionError("empirical feature vector has the wrong dimension");
    const auto o = solver_options(cfg);
    const auto r = features.rewards(psi);
    std::span<const double> warm;
    if (warm_start && warm_start->size() == mdp.num_states()) warm = *warm_start;
    const auto sv = soft_value_iteration(mdp, r, o, warm);
    if (!sv.converged)
        throw PreconditionError("soft value iteration did not converge (residual " + format_double(sv.residual) + ")");
    if (warm_start) *warm_start = sv.V;
    const auto pi = boltzmann_policy(mdp, sv);

    ObjectiveValue out;
    out.model = feature_expectations(features, expected_visitation(mdp, pi, cfg.horizon, cfg.gamma));
    double norm2 = 0.0, dot = 0.0;
    out.gradient.resize(psi.size());
    for (std::size_t i = 0; i < psi.size(); ++i) {
        dot += psi[i] * empirical[i];
        norm2 += psi[i] * psi[i];
        out.gradient[i] = empirical[i] - out.model[i] - cfg.l2_reg * psi[i];
    }
    out.value = dot - sv.V[mdp.initial_state()] - 0.5 * cfg.l2_reg * norm2;
    return out;
}

// ---------------------------------------------------------------------------------------------
// Fitting

IrlResult irl_fit(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> empirical,
                  const IrlConfig& cfg)
{
    cfg.validate();
    const std::size_t dim = features.dim();
    if (empirical.size() != dim) throw PreconditionError("empirical feature vector has the wrong dimension");

    IrlResult res;
    res.empirical.assign(empirical.begin(), empirical.end());
    res.psi_hat.psi.assign(dim, 0.0);
    if (cfg.init == IrlConfig::Init::seeded_uniform) {
        SplitMix64 rng(derive_seed(cfg.init_seed, 0, 0));
        for (double& x : res.psi_hat.psi) x = -0.1 + 0.2 * rng.uniform();
    }

    std::vector<double> warm;
    std::size_t drops = 0;
    double best = -std::numeric_limits<double>::infinity();
    auto& psi = res.psi_hat.psi;
    for (;;) {
        const auto obj = maxent_objective(mdp, features, psi, empirical, cfg, &warm);
        best = std::max(best, obj.value);
        if (obj.value < best - 1e-3) {
            if (++drops >= 5)
                throw DivergenceError("objective stayed below its best (" + format_double(best) +
                                      ") for 5 consecutive epochs (last " + format_double(obj.value) +
                                      "); reduce learning_rate below " + format_double(cfg.learning_rate));
        } else {
            drops = 0;
        }
        res.log_likelihood_curve.push_back(obj.value);
        res.model = obj.model;
        res.grad_norm_final = max_abs(obj.gradient);
        if (res.grad_norm_final < cfg.grad_tol) {
            res.converged = true;
            break;
        }
        if (res.epochs_run == cfg.max_epochs) break;
        for (std::size_t i = 0; i < dim; ++i) psi[i] += cfg.learning_rate * obj.gradient[i];
        ++res.epochs_run;
    }
    return res;
}

IrlResult irl_fit(const AttackerMdp& mdp, const TrajectorySet& ts, const IrlConfig& cfg)
{
    cfg.validate();
    const auto empirical = empirical_feature_expectations(ts, cfg.gamma, cfg.include_non_stationary);
    if (ts.scenario_hash != mdp.scenario_hash())
        throw PreconditionError("trajectory set scenario hash " + ts.scenario_hash + " does not match the MDP's " +
                                mdp.scenario_hash());
    return irl_fit(mdp.tabular(), mdp.features(), empirical, cfg);
}

// ---------------------------------------------------------------------------------------------
// Evaluation

namespace {

SoftViOptions evaluation_options(double gamma)
{
    SoftViOptions o;
    o.gamma = gamma;
    o.tol = 1e-10;
    o.sweep = Sweep::gauss_seidel_reverse;
    return o;
}

double value_at_start(const TabularMdp& mdp, std::span<const double> rewards, const Policy& pi, double gamma)
{
    const auto pv = evaluate_policy(mdp, rewards, pi, gamma, 1e-10, 100000, Sweep::gauss_seidel_reverse);
    if (!pv.converged) throw PreconditionError("policy evaluation did not converge");
    return pv.V[mdp.initial_state()];
}

}  // namespace

double optimal_value(const AttackerMdp& mdp, const RewardParams& psi_true, double gamma)
{
    const auto& truth = mdp.features(FeatureMode::ground_truth);
    require_dim(truth, psi_true.psi);
    const auto r = truth.rewards(psi_true.psi);
    return value_at_start(mdp.tabular(), r, optimal_policy(mdp.tabular(), truth, psi_true.psi, evaluation_options(gamma)),
                          gamma);
}

double evd(const AttackerMdp& mdp, const RewardParams& psi_true, const RewardParams& psi_hat, double gamma)
{
    const auto& truth = mdp.features(FeatureMode::ground_truth);
    require_dim(truth, psi_true.psi);
    require_dim(truth, psi_hat.psi);
    const auto o = evaluation_options(gamma);
    const auto r = truth.rewards(psi_true.psi);
    const auto best = optimal_policy(mdp.tabular(), truth, psi_true.psi, o);
    const auto learned = optimal_policy(mdp.tabular(), truth, psi_hat.psi, o);
    return value_at_start(mdp.tabular(), r, best, gamma) - value_at_start(mdp.tabular(), r, learned, gamma);
}

double counterfactual_evaluate(const AttackerMdp& mdp, const RewardParams& psi, const Policy& policy, double gamma,
                               FeatureMode mode)
{
    const auto& f = mdp.features(mode);
    require_dim(f, psi.psi);
    return value_at_start(mdp.tabular(), f.rewards(psi.psi), policy, gamma);
}

double policy_agreement(const TabularMdp& mdp, const Policy& a, const Policy& b, std::span<const std::uint32_t> states)
{
    check_policy(mdp, a);
    check_policy(mdp, b);
    if (states.empty()) throw PreconditionError("policy agreement needs at least one state");
    double tv_sum = 0.0;
    for (auto s : states) {
        double tv = 0.0;
        for (auto slot = mdp.slot_begin(s); slot < mdp.slot_end(s); ++slot) tv += std::abs(a.probs[slot] - b.probs[slot]);
        tv_sum += 0.5 * tv;
    }
    return 1.0 - tv_sum / static_cast<double>(states.size());
}

std::vector<std::uint32_t> visited_states(const TabularMdp& mdp, std::span<const SlotTrajectory> demos)
{
    std::vector<char> seen(mdp.num_states(), 0);
    for (const auto& demo : demos)
        for (auto slot : demo) seen[mdp.state_of(slot)] = 1;
    std::vector<std::uint32_t> out;
    for (std::uint32_t s = 0; s < seen.size(); ++s)
        if (seen[s]) out.push_back(s);
    return out;
}

}  // namespace cyberirl
