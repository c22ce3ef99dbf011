#pragma once

#include "cyberirl/tabular.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace cyberirl {

/// In-place sweep order for the value iterations. Jacobi reads only the previous iterate; the
/// reverse Gauss-Seidel sweep updates in place from the highest state index down, which converges
/// in far fewer sweeps on breadth-first-numbered kill-chain MDPs. Both reach the same fixed point.
enum class Sweep { jacobi, gauss_seidel_reverse };

struct SoftViOptions {
    double gamma = 0.95;
    double temperature = 1.0;
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    Sweep sweep = Sweep::jacobi;
};

/// Soft (or hard) state and action values of a tabular MDP under a fixed per-slot reward.
struct SoftValues {
    std::vector<double> V;  // per state
    std::vector<double> Q;  // per action slot
    double gamma = 0.0;
    double temperature = 0.0;
    std::size_t iterations_run = 0;
    double residual = 0.0;
    bool converged = false;
};

/// A stochastic policy stored per action slot; probabilities of each state's slots sum to 1.
struct Policy {
    std::vector<double> probs;

    bool operator==(const Policy&) const = default;
};

/// Soft value iteration:
///   Q(s,a) = r(s,a) + gamma * sum_s' p(s'|s,a) V(s')
///   V(s)   = temperature * log sum_a exp(Q(s,a) / temperature)
/// iterated until the max-norm update is below tol or max_iter sweeps have run (then the result
/// carries converged = false). `warm_start`, when non-empty, seeds V.
/// Throws PreconditionError on gamma outside (0,1), temperature <= 0, tol <= 0 or a reward vector
/// of the wrong length.
SoftValues soft_value_iteration(const TabularMdp& mdp, std::span<const double> rewards,
                                const SoftViOptions& options = {}, std::span<const double> warm_start = {});

/// Standard (hard max) value iteration with the same conventions; temperature is ignored.
SoftValues value_iteration(const TabularMdp& mdp, std::span<const double> rewards, const SoftViOptions& options = {},
                           std::span<const double> warm_start = {});

/// pi(a|s) = exp(Q(s,a)/T) / sum_a' exp(Q(s,a')/T), computed with max-subtraction.
Policy boltzmann_policy(const TabularMdp& mdp, const SoftValues& sv);

/// Deterministic argmax of Q per state; ties go to the lowest slot.
Policy greedy_policy(const TabularMdp& mdp, const SoftValues& sv);

/// Uniform over each state's legal actions.
Policy uniform_policy(const TabularMdp& mdp);

struct PolicyValues {
    std::vector<double> V;
    std::size_t iterations_run = 0;
    double residual = 0.0;
    bool converged = false;
};

/// Iterative policy evaluation of V^pi under the per-slot reward.
PolicyValues evaluate_policy(const TabularMdp& mdp, std::span<const double> rewards, const Policy& policy,
                             double gamma, double tol = 1e-10, std::size_t max_iter = 100000,
                             Sweep sweep = Sweep::jacobi);

/// Throws PreconditionError unless the policy has one entry per slot, each in [0,1], and every
/// state's entries sum to 1 within 1e-9.
void check_policy(const TabularMdp& mdp, const Policy& policy);

/// temperature * log sum exp(x / temperature), with max-subtraction.
double soft_max(std::span<const double> x, double temperature);

}  // namespace cyberirl
