#pragma once

#include "fairalloc/core.hpp"
#include "fairalloc/ledger.hpp"
#include "fairalloc/rounding.hpp"

#include <cstddef>
#include <vector>

namespace fairalloc {

// Snapshot of how far each account has drifted from its pro-rata share of the
// fund. d/e are the per-account gaps after normalizing by the allocation
// factor: an account exactly on its share has d = e = 0.
struct DivergenceState {
    std::vector<Rational> d;          // pro-rata P&L gap, currency minor units
    std::vector<Rational> e;          // pro-rata position gap, contracts
    Rational q;                       // sum of squared P&L gaps (currency^2)
    Rational q_return;                // q / (total AUM)^2, dimensionless
    Rational fund_return;             // fund P&L / total AUM
    std::vector<Rational> account_return;  // account P&L / account AUM
};

DivergenceState divergence(const LedgerState& state, const AccountBook& book);

enum class SearchMode { Proportional, Corrective };

struct SearchConfig {
    int k = 2;                // L-infinity radius searched around the base rounding
    SearchMode mode = SearchMode::Proportional;
    Money probe = 0;          // projected price move; 0 = last move, else 1% of price
    std::size_t nmax = 12;    // account count above which local search replaces enumeration
    std::size_t max_local_iterations = 0;  // 0 = account count squared
    // Candidate-count cap: even under the account cutoff, a wide box can
    // explode combinatorially, so enumeration also yields to local search when
    // the (cheaply counted) candidate set exceeds this.
    std::size_t max_enumeration = 4096;
};

enum class WeightFrequency { PerFill, Weekly, Monthly, Quarterly };

// Softmax weights that tilt the objective toward the accounts currently
// furthest from the fund return.
struct ReinforcementWeights {
    std::vector<double> delta;  // |fund return - account return|
    std::vector<double> w;      // exp(delta_i) / sum exp(delta_j)
    WeightFrequency frequency = WeightFrequency::PerFill;
};

ReinforcementWeights reinforcement_weights(const LedgerState& state, const AccountBook& book,
                                           WeightFrequency frequency = WeightFrequency::PerFill);

// Refresh-bucket index for a trading day: weights are recomputed when the
// bucket changes and held constant in between. Per-fill always refreshes.
int weight_bucket(WeightFrequency frequency, int day);

// All sum-preserving, sign-admissible integer vectors within the search box
// around base, in ascending lexicographic order. Above the account cutoff (or
// the candidate-count cap) this is instead the single-unit transfer
// neighborhood of base, which is what local search explores.
std::vector<AllocationVector> candidates(const Fill& fill, const AllocationVector& base,
                                         const SearchConfig& config);

// Ordered score; smaller is better. Keys cascade: position divergence and
// probe-projected P&L divergence (order depends on the mode), then L1
// distance to the exact pro-rata split, then the parts themselves. Keys are
// exact rationals under uniform weights; reinforcement weights switch the
// first two keys to long double with a relative tolerance before tiebreaks.
struct Score {
    bool exact = true;
    Rational key1_x, key2_x;
    long double key1_f = 0.0L, key2_f = 0.0L;
    Rational key3;             // L1 distance to fractional targets, always exact
    std::vector<Qty> parts;

    // -1 if a scores better than b, 0 tie, +1 worse.
    static int compare(const Score& a, const Score& b);
    bool operator<(const Score& other) const { return compare(*this, other) < 0; }
};

// state must already be marked at the candidate's fill price and not yet hold
// the candidate's parts. A zero config probe falls back to 1% of the marked
// price (floored at one minor unit); pass an explicit probe to use the
// previous price move.
Score score(const AllocationVector& candidate, const LedgerState& state, const AccountBook& book,
            const SearchConfig& config, const ReinforcementWeights* weights = nullptr);

// Marks the ledger at the fill price (advancing the reference price), rounds
// the pro-rata split as the search base, and returns the best-scoring
// admissible vector. The caller applies the returned parts
// (LedgerState::add_parts); this function does not.
AllocationVector allocate_fill_four(const Fill& fill, LedgerState& state, const AccountBook& book,
                                    const SearchConfig& config,
                                    const ReinforcementWeights* weights = nullptr);

}  // namespace fairalloc
