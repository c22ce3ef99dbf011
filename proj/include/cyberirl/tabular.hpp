#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace cyberirl {

struct Outcome {
    std::uint32_t next = 0;
    double prob = 0.0;
};

/// Compressed sparse tabular MDP. Each state owns a contiguous run of action "slots"; each slot
/// owns a contiguous run of outcomes. Only legal actions get slots, so a policy stored per slot
/// can never put mass on an illegal action.
class TabularMdp {
public:
    /// Starts a new state; returns its index.
    std::uint32_t add_state();

    /// Appends an action slot to the most recently added state. Probabilities must sum to 1
    /// within 1e-12; throws PreconditionError otherwise.
    std::size_t add_action(std::span<const Outcome> outcomes);

    /// Checks every state has at least one action and every successor index is in range.
    void finalize();

    std::size_t num_states() const { return state_begin_.size(); }
    std::size_t num_slots() const { return slot_state_.size(); }

    std::size_t slot_begin(std::size_t s) const { return state_begin_[s]; }
    std::size_t slot_end(std::size_t s) const
    {
        return s + 1 < state_begin_.size() ? state_begin_[s + 1] : slot_state_.size();
    }
    std::size_t num_actions(std::size_t s) const { return slot_end(s) - slot_begin(s); }
    std::uint32_t state_of(std::size_t slot) const { return slot_state_[slot]; }

    std::span<const Outcome> outcomes(std::size_t slot) const
    {
        return {outcomes_.data() + outcome_begin_[slot], outcome_begin_[slot + 1] - outcome_begin_[slot]};
    }

    std::uint32_t initial_state() const { return initial_; }
    void set_initial_state(std::uint32_t s) { initial_ = s; }

    std::size_t num_outcomes() const { return outcomes_.size(); }

private:
    std::vector<std::size_t> state_begin_;
    std::vector<std::uint32_t> slot_state_;
    std::vector<std::size_t> outcome_begin_{0};
    std::vector<Outcome> outcomes_;
    std::uint32_t initial_ = 0;
};

/// One fixed-length feature row per action slot.
class FeatureTable {
public:
    FeatureTable() = default;
    FeatureTable(std::size_t dim, std::size_t slots) : dim_(dim), values_(dim * slots, 0.0) {}

    std::size_t dim() const { return dim_; }
    std::size_t num_slots() const { return dim_ == 0 ? 0 : values_.size() / dim_; }

    std::span<double> row(std::size_t slot) { return {values_.data() + slot * dim_, dim_}; }
    std::span<const double> row(std::size_t slot) const { return {values_.data() + slot * dim_, dim_}; }

    /// r[slot] = psi . f(slot). Throws PreconditionError on dimension mismatch.
    std::vector<double> rewards(std::span<const double> psi) const;

private:
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

}  // namespace cyberirl
