#include "cyberirl/softrl.hpp"

#include "cyberirl/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace cyberirl {

namespace {

void check_options(const TabularMdp& mdp, std::span<const double> rewards, const SoftViOptions& o, bool soft)
{
    if (!(o.gamma > 0.0 && o.gamma < 1.0)) throw PreconditionError("gamma must lie in (0, 1)");
    if (soft && !(o.temperature > 0.0)) throw PreconditionError("temperature must be positive");
    if (!(o.tol > 0.0)) throw PreconditionError("tol must be positive");
    if (rewards.size() != mdp.num_slots())
        throw PreconditionError("reward vector has " + std::to_string(rewards.size()) + " entries for " +
                                std::to_string(mdp.num_slots()) + " action slots");
}

double expected_next(const TabularMdp& mdp, std::size_t slot, const std::vector<double>& V)
{
    double acc = 0.0;
    for (const auto& o : mdp.outcomes(slot)) acc += o.prob * V[o.next];
    return acc;
}

// Generic value iteration; `backup` maps the Q values of one state's slots to V(s).
template <class Backup>
SoftValues iterate(const TabularMdp& mdp, std::span<const double> rewards, const SoftViOptions& o,
                   std::span<const double> warm_start, Backup backup)
{
    const std::size_t n = mdp.num_states();
    SoftValues sv;
    sv.gamma = o.gamma;
    sv.temperature = o.temperature;
    sv.Q.assign(mdp.num_slots(), 0.0);
    if (!warm_start.empty()) {
        if (warm_start.size() != n) throw PreconditionError("warm start has the wrong number of states");
        sv.V.assign(warm_start.begin(), warm_start.end());
    } else {
        sv.V.assign(n, 0.0);
    }
    std::vector<double> next = sv.V;

    auto update = [&](std::size_t s, const std::vector<double>& read) {
        const auto b = mdp.slot_begin(s), e = mdp.slot_end(s);
        for (auto a = b; a < e; ++a) sv.Q[a] = rewards[a] + o.gamma * expected_next(mdp, a, read);
        return backup(std::span<const double>(sv.Q.data() + b, e - b));
    };

    sv.residual = std::numeric_limits<double>::infinity();
    while (sv.iterations_run < o.max_iter) {
        double residual = 0.0;
        if (o.sweep == Sweep::jacobi) {
            for (std::size_t s = 0; s < n; ++s) {
                next[s] = update(s, sv.V);
                residual = std::max(residual, std::abs(next[s] - sv.V[s]));
            }
            sv.V.swap(next);
        } else {
            for (std::size_t s = n; s-- > 0;) {
                const double v = update(s, sv.V);
                residual = std::max(residual, std::abs(v - sv.V[s]));
                sv.V[s] = v;
            }
        }
        ++sv.iterations_run;
        sv.residual = residual;
        if (!std::isfinite(residual)) break;
        if (residual < o.tol) {
            sv.converged = true;
            break;
        }
    }
    // Q consistent with the returned V.
    for (std::size_t a = 0; a < mdp.num_slots(); ++a) sv.Q[a] = rewards[a] + o.gamma * expected_next(mdp, a, sv.V);
    return sv;
}

}  // namespace

double soft_max(std::span<const double> x, double temperature)
{
    const double m = *std::max_element(x.begin(), x.end());
    double acc = 0.0;
    for (double v : x) acc += std::exp((v - m) / temperature);
    return m + temperature * std::log(acc);
}

SoftValues soft_value_iteration(const TabularMdp& mdp, std::span<const double> rewards, const SoftViOptions& options,
                                std::span<const double> warm_start)
{
    check_options(mdp, rewards, options, true);
    const double t = options.temperature;
    return iterate(mdp, rewards, options, warm_start, [t](std::span<const double> q) { return soft_max(q, t); });
}

SoftValues value_iteration(const TabularMdp& mdp, std::span<const double> rewards, const SoftViOptions& options,
                           std::span<const double> warm_start)
{
    check_options(mdp, rewards, options, false);
    return iterate(mdp, rewards, options, warm_start,
                   [](std::span<const double> q) { return *std::max_element(q.begin(), q.end()); });
}

Policy boltzmann_policy(const TabularMdp& mdp, const SoftValues& sv)
{
    Policy pi;
    pi.probs.assign(mdp.num_slots(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const auto b = mdp.slot_begin(s), e = mdp.slot_end(s);
        double m = -std::numeric_limits<double>::infinity();
        for (auto a = b; a < e; ++a) m = std::max(m, sv.Q[a]);
        double z = 0.0;
        for (auto a = b; a < e; ++a) z += pi.probs[a] = std::exp((sv.Q[a] - m) / sv.temperature);
        for (auto a = b; a < e; ++a) pi.probs[a] /= z;
    }
    return pi;
}

Policy greedy_policy(const TabularMdp& mdp, const SoftValues& sv)
{
    Policy pi;
    pi.probs.assign(mdp.num_slots(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        auto best = mdp.slot_begin(s);
        for (auto a = best + 1; a < mdp.slot_end(s); ++a)
            if (sv.Q[a] > sv.Q[best]) best = a;
        pi.probs[best] = 1.0;
    }
    return pi;
}

Policy uniform_policy(const TabularMdp& mdp)
{
    Policy pi;
    pi.probs.assign(mdp.num_slots(), 0.0);
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        const double p = 1.0 / static_cast<double>(mdp.num_actions(s));
        for (auto a = mdp.slot_begin(s); a < mdp.slot_end(s); ++a) pi.probs[a] = p;
    }
    return pi;
}

void check_policy(const TabularMdp& mdp, const Policy& policy)
{
    if (policy.probs.size() != mdp.num_slots())
        throw PreconditionError("policy has " + std::to_string(policy.probs.size()) + " entries for " +
                                std::to_string(mdp.num_slots()) + " action slots");
    for (std::size_t s = 0; s < mdp.num_states(); ++s) {
        double total = 0.0;
        for (auto a = mdp.slot_begin(s); a < mdp.slot_end(s); ++a) {
            const double p = policy.probs[a];
            if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError("policy probability outside [0, 1]");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw PreconditionError("policy row of state " + std::to_string(s) + " sums to " + std::to_string(total));
    }
}

PolicyValues evaluate_policy(const TabularMdp& mdp, std::span<const double> rewards, const Policy& policy,
                             double gamma, double tol, std::size_t max_iter, Sweep sweep)
{
    check_options(mdp, rewards, SoftViOptions{gamma, 1.0, tol, max_iter, sweep}, false);
    check_policy(mdp, policy);

    // Collapse the policy into a per-state expected reward once.
    const std::size_t n = mdp.num_states();
    std::vector<double> r_pi(n, 0.0);
    for (std::size_t a = 0; a < mdp.num_slots(); ++a) r_pi[mdp.state_of(a)] += policy.probs[a] * rewards[a];

    PolicyValues out;
    out.V.assign(n, 0.0);
    std::vector<double> next(n, 0.0);
    auto update = [&](std::size_t s, const std::vector<double>& read) {
        double v = r_pi[s];
        for (auto a = mdp.slot_begin(s); a < mdp.slot_end(s); ++a)
            if (policy.probs[a] > 0.0) v += gamma * policy.probs[a] * expected_next(mdp, a, read);
        return v;
    };

    out.residual = std::numeric_limits<double>::infinity();
    while (out.iterations_run < max_iter) {
        double residual = 0.0;
        if (sweep == Sweep::jacobi) {
            for (std::size_t s = 0; s < n; ++s) {
                next[s] = update(s, out.V);
                residual = std::max(residual, std::abs(next[s] - out.V[s]));
            }
            out.V.swap(next);
        } else {
            for (std::size_t s = n; s-- > 0;) {
                const double v = update(s, out.V);
                residual = std::max(residual, std::abs(v - out.V[s]));
                out.V[s] = v;
            }
        }
        ++out.iterations_run;
        out.residual = residual;
        if (residual < tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

}  // namespace cyberirl
