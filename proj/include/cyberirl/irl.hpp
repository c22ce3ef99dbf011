#pragma once

#include "cyberirl/mdp.hpp"
#include "cyberirl/sim.hpp"
#include "cyberirl/softrl.hpp"
#include "cyberirl/tabular.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace cyberirl {

struct IrlConfig {
    enum class Init { zeros, seeded_uniform };

    double learning_rate = 0.05;
    std::size_t max_epochs = 500;
    double grad_tol = 1e-3;
    double l2_reg = 1e-3;
    /// Forward-pass truncation for the model feature expectations.
    std::size_t horizon = 100;
    double gamma = 0.95;
    double temperature = 1.0;
    Init init = Init::zeros;
    std::uint64_t init_seed = 0;  // seeded_uniform draws psi from U(-0.1, 0.1)
    /// Fit on trajectories tagged non-stationary too.
    bool include_non_stationary = false;
    double solver_tol = 1e-9;
    Sweep sweep = Sweep::gauss_seidel_reverse;

    /// Throws PreconditionError naming the offending field.
    void validate() const;
};

struct IrlResult {
    RewardParams psi_hat;
    /// Objective value before each step (and once more at the end).
    std::vector<double> log_likelihood_curve;
    double grad_norm_final = 0.0;  // max-norm
    bool converged = false;
    std::size_t epochs_run = 0;
    FeatureVector empirical;
    FeatureVector model;
};

/// Demonstrations on a tabular MDP: each trajectory is its sequence of action slots (the slot
/// determines the state).
using SlotTrajectory = std::vector<std::size_t>;

/// Mean over trajectories of sum_t gamma^t f(s_t, a_t), using the logged feature vectors.
/// Throws PreconditionError on an empty set, on mixed scenario hashes, and when no stationary
/// trajectory remains after filtering.
FeatureVector empirical_feature_expectations(const TrajectorySet& ts, double gamma,
                                             bool include_non_stationary = false);

/// Same quantity on a tabular MDP from slot sequences.
FeatureVector empirical_feature_expectations(const FeatureTable& features, std::span<const SlotTrajectory> demos,
                                             double gamma);

/// Discounted state-action visitation sum_{t<horizon} gamma^t D_t(s) pi(a|s) per slot, starting
/// from a point mass on the initial state. Throws PreconditionError on horizon 0.
std::vector<double> expected_visitation(const TabularMdp& mdp, const Policy& policy, std::size_t horizon,
                                        double gamma);

/// The per-timestep state marginals D_0 .. D_{horizon-1}.
std::vector<std::vector<double>> state_marginals(const TabularMdp& mdp, const Policy& policy, std::size_t horizon);

/// sum_slot mass[slot] * f(slot).
FeatureVector feature_expectations(const FeatureTable& features, std::span<const double> slot_mass);

/// Converts logged trajectories to slot sequences on `mdp`. Throws PreconditionError when a
/// record's state or action is not part of the compiled MDP or the hashes differ.
std::vector<SlotTrajectory> to_slot_trajectories(const AttackerMdp& mdp, const TrajectorySet& ts,
                                                 bool include_non_stationary = false);

/// sum over trajectories and steps of log pi_psi(a_t | s_t) with pi the Boltzmann policy of the
/// soft values under psi.
double log_likelihood(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                      std::span<const SlotTrajectory> demos, const SoftViOptions& options);
double log_likelihood(const AttackerMdp& mdp, const RewardParams& psi, const TrajectorySet& ts, double gamma,
                      double temperature);

/// Exact gradient of log_likelihood with respect to psi, via the soft successor features
/// Phi(s) = dV(s)/dpsi.
std::vector<double> log_likelihood_gradient(const TabularMdp& mdp, const FeatureTable& features,
                                            std::span<const double> psi, std::span<const SlotTrajectory> demos,
                                            const SoftViOptions& options);

struct ObjectiveValue {
    double value = 0.0;
    std::vector<double> gradient;
    FeatureVector model;  // feature expectations of the current soft policy
};

/// The maximum-entropy trajectory log-likelihood, per trajectory:
///   L(psi) = psi . f_emp - V_psi(s0) - (l2/2) |psi|^2
/// with gradient f_emp - f_model - l2 psi, where f_model comes from the forward visitation pass of
/// the Boltzmann policy truncated at cfg.horizon. The gradient is exact as the horizon grows.
ObjectiveValue maxent_objective(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                                std::span<const double> empirical, const IrlConfig& cfg,
                                std::vector<double>* warm_start = nullptr);

/// Plain gradient ascent on maxent_objective. Throws PreconditionError on empty data and
/// DivergenceError when the objective falls by more than 1e-3 for 5 consecutive epochs.
IrlResult irl_fit(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> empirical,
                  const IrlConfig& cfg);
IrlResult irl_fit(const AttackerMdp& mdp, const TrajectorySet& ts, const IrlConfig& cfg);

/// Boltzmann policy of the soft values under psi on the given features.
Policy soft_policy(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                   const SoftViOptions& options);

/// Optimal (greedy, hard value iteration) policy under psi.
Policy optimal_policy(const TabularMdp& mdp, const FeatureTable& features, std::span<const double> psi,
                      const SoftViOptions& options);

/// Expected value difference on ground-truth features:
///   V^{pi*(psi_true)}_{psi_true}(s0) - V^{pi*(psi_hat)}_{psi_true}(s0)
/// with pi* the greedy optimal policies. Non-negative up to solver tolerance.
double evd(const AttackerMdp& mdp, const RewardParams& psi_true, const RewardParams& psi_hat, double gamma);

/// V^{pi*(psi_true)}_{psi_true}(s0) on ground-truth features.
double optimal_value(const AttackerMdp& mdp, const RewardParams& psi_true, double gamma);

/// Model-based off-policy value of `policy` at s0 under reward psi, using the features of `mode`.
double counterfactual_evaluate(const AttackerMdp& mdp, const RewardParams& psi, const Policy& policy, double gamma,
                               FeatureMode mode = FeatureMode::ground_truth);

/// 1 - mean total-variation distance between the two policies over the given states.
double policy_agreement(const TabularMdp& mdp, const Policy& a, const Policy& b, std::span<const std::uint32_t> states);

/// Distinct states visited by the demonstrations, ascending.
std::vector<std::uint32_t> visited_states(const TabularMdp& mdp, std::span<const SlotTrajectory> demos);

}  // namespace cyberirl
