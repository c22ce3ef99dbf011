#include "cyberirl/tabular.hpp"

#include "cyberirl/error.hpp"

#include <cmath>
#include <string>

namespace cyberirl {

std::uint32_t TabularMdp::add_state()
{
    state_begin_.push_back(slot_state_.size());
    return static_cast<std::uint32_t>(state_begin_.size() - 1);
}

std::size_t TabularMdp::add_action(std::span<const Outcome> outcomes)
{
    if (state_begin_.empty()) throw PreconditionError("add_action called before add_state");
    double total = 0.0;
    for (const auto& o : outcomes) {
        if (!(o.prob >= 0.0 && o.prob <= 1.0))
            throw PreconditionError("transition probability outside [0, 1]");
        total += o.prob;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw PreconditionError("transition row sums to " + std::to_string(total) + ", not 1");
    slot_state_.push_back(static_cast<std::uint32_t>(state_begin_.size() - 1));
    outcomes_.insert(outcomes_.end(), outcomes.begin(), outcomes.end());
    outcome_begin_.push_back(outcomes_.size());
    return slot_state_.size() - 1;
}

void TabularMdp::finalize()
{
    const auto n = num_states();
    for (std::size_t s = 0; s < n; ++s)
        if (num_actions(s) == 0)
            throw PreconditionError("state " + std::to_string(s) + " has no actions");
    for (const auto& o : outcomes_)
        if (o.next >= n) throw PreconditionError("successor index out of range");
    if (initial_ >= n) throw PreconditionError("initial state out of range");
}

std::vector<double> FeatureTable::rewards(std::span<const double> psi) const
{
    if (psi.size() != dim_)
        throw PreconditionError("reward parameter dimension " + std::to_string(psi.size()) +
                                " does not match feature dimension " + std::to_string(dim_));
    const auto slots = num_slots();
    std::vector<double> r(slots, 0.0);
    for (std::size_t a = 0; a < slots; ++a) {
        const auto f = row(a);
        double acc = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) acc += psi[i] * f[i];
        r[a] = acc;
    }
    return r;
}

}  // namespace cyberirl
