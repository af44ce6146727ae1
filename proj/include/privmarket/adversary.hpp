#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "privmarket/cost_market.hpp"
#include "privmarket/noisy_market.hpp"
#include "privmarket/random.hpp"

namespace pm {

// Pushes the published state toward a fixed target, capped at the trade
// bound. Deterministic; never emits more than max_trade in magnitude.
struct TargetStrategy {
    double target = 0.0;
    double max_trade = 1.0;

    double decide(std::span<const double> /*past_trades*/,
                  std::span<const double> published_states,
                  Rng& /*rng*/) const {
        const double state = published_states.back();
        if (state <= target) return std::min(target - state, max_trade);
        return -std::min(state - target, max_trade);
    }
};

inline TargetStrategy target_strategy(double target, double max_trade) {
    if (!(max_trade > 0.0))
        throw std::domain_error("target_strategy: trade bound must be positive");
    return {target, max_trade};
}

// Identical to the target strategy except at one probe round, where it jumps
// to the displaced point target + max_trade/2 whenever that lies within one
// trade's reach, and sits out otherwise.
struct DeviationStrategy {
    TargetStrategy base;
    std::size_t probe_round = 1;

    double decide(std::span<const double> past_trades,
                  std::span<const double> published_states, Rng& rng) const {
        const std::size_t round = past_trades.size() + 1;
        if (round != probe_round)
            return base.decide(past_trades, published_states, rng);
        const double displaced = base.target + base.max_trade / 2.0;
        const double jump = displaced - published_states.back();
        return std::abs(jump) <= base.max_trade ? jump : 0.0;
    }
};

inline DeviationStrategy deviation_strategy(double target, double max_trade,
                                            std::size_t probe_round) {
    if (probe_round < 1)
        throw std::domain_error("deviation_strategy: probe round starts at 1");
    return {target_strategy(target, max_trade), probe_round};
}

/// Expected maker loss from one trade of x at published state pre_state when
/// the outcome is Bernoulli(price(anchor)):
///   price(anchor) * x - C(pre_state + x) + C(pre_state).
/// Nonnegative for every trade the target strategy emits, and at least
/// divergence_floor(c, anchor, gamma) when |pre_state - anchor| >= gamma.
double per_trade_expected_profit(const CostFunction auto& c, double anchor,
                                 double pre_state, double x) {
    return c.price(anchor) * x - c.cost(pre_state + x) + c.cost(pre_state);
}

struct LossBoundEstimate {
    double bound = 0.0;        // divergence floor x summed displacement frequency
    double mean_profit = 0.0;  // mean over traces of the summed per-trade profits
    std::size_t traces = 0;
};

/// Lower bound on the maker's expected loss reconstructed from target-
/// strategy traces: divergence_floor(c, target, gamma) times the per-round
/// empirical frequency of |qprime - target| >= gamma, summed over rounds.
/// gamma must not exceed the trade bound the traces were produced with.
LossBoundEstimate loss_lower_bound(std::span<const TradeLedger> traces,
                                   double target, double gamma,
                                   const CostFunction auto& c) {
    if (traces.empty())
        throw std::invalid_argument("loss_lower_bound: no traces");
    const double floor = divergence_floor(c, target, gamma);
    double displaced_rounds = 0.0;
    double profit_sum = 0.0;
    for (const TradeLedger& ledger : traces) {
        for (const LedgerRow& row : ledger.rows) {
            if (std::abs(row.qprime - target) >= gamma) displaced_rounds += 1.0;
            profit_sum += per_trade_expected_profit(c, target, row.qprime, row.x);
        }
    }
    const auto n = static_cast<double>(traces.size());
    return {floor * displaced_rounds / n, profit_sum / n, traces.size()};
}

struct ProbeResult {
    std::size_t probe_round = 0;
    double p1 = 0.0;           // Pr(stay in the target region | target strategy)
    double p2 = 0.0;           // same, one probe-round deviation to the displaced point
    double implied_eps = 0.0;  // log(p1 / (1 - p1)); +inf when p1 = 1
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t conditioning_events = 0;
    std::size_t trials = 0;
};

namespace detail {
inline double logit(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    return std::log(p / (1.0 - p));
}
}  // namespace detail

/// Empirical floor on the privacy parameter a noise process admits at the
/// probe round. Conditioned on the published state sitting inside the open
/// region of radius max_trade/4 around the target, measures how often the
/// next published state stays inside under the target strategy (p1) versus
/// under the one-round deviation to target + max_trade/2 (p2). Both arms
/// share each trial's noise path, which is legitimate because the two trade
/// histories agree everywhere the noise can see. Returns log(p1/(1-p1)) with
/// a 95% normal-approximation binomial interval mapped through the same
/// transform. Throws when no conditioning event ever occurs.
template <CostFunction C>
ProbeResult privacy_probe(const C& cost_fn, const NoiseFactory& make_noise,
                          double max_trade, double target,
                          std::size_t probe_round, std::size_t trials,
                          std::uint64_t seed) {
    if (probe_round < 1)
        throw std::invalid_argument("privacy_probe: probe round starts at 1");
    if (trials < 1) throw std::invalid_argument("privacy_probe: no trials");

    const double radius = max_trade / 4.0;
    const double displaced = target + max_trade / 2.0;
    std::size_t conditioned = 0, stayed = 0, stayed_deviated = 0;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, trial));
        auto noise = make_noise();
        TradeLedger ledger =
            simulate(TargetStrategy{target, max_trade}, *noise, cost_fn,
                     max_trade, probe_round + 1, 0.0, 0.0, rng);
        const LedgerRow& at = ledger.rows[probe_round - 1];
        if (!(std::abs(at.qprime - target) < radius)) continue;
        ++conditioned;
        const LedgerRow& after = ledger.rows[probe_round];
        if (std::abs(after.qprime - target) < radius) ++stayed;
        // Counterfactual next state under the deviation: same true state and
        // same noise draw, only the probe-round trade differs.
        const double jump = displaced - at.qprime;  // |jump| <= 3/4 max_trade here
        const double deviated_state = at.q + jump + after.eta;
        if (std::abs(deviated_state - target) < radius) ++stayed_deviated;
    }

    if (conditioned == 0)
        throw std::runtime_error(
            "privacy_probe: no trial reached the conditioning region; "
            "increase trials or move the target");

    ProbeResult result;
    result.probe_round = probe_round;
    result.trials = trials;
    result.conditioning_events = conditioned;
    const auto n = static_cast<double>(conditioned);
    result.p1 = static_cast<double>(stayed) / n;
    result.p2 = static_cast<double>(stayed_deviated) / n;
    result.implied_eps = detail::logit(result.p1);
    const double half_width = 1.96 * std::sqrt(result.p1 * (1.0 - result.p1) / n);
    result.ci_low = detail::logit(std::max(0.0, result.p1 - half_width));
    result.ci_high = detail::logit(std::min(1.0, result.p1 + half_width));
    return result;
}

}  // namespace pm
