#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "privmarket/cost_market.hpp"
#include "privmarket/random.hpp"

namespace pm {

// View of the past handed to a noise process when eta_{t+1} is drawn. The
// trade x_t that was just executed is structurally absent: `trades` ends at
// x_{t-1}. This is the trade-independent noise contract; a process cannot
// break it because the data never reaches it.
struct NoiseContext {
    std::size_t round = 1;            // index t+1 of the noise being drawn
    std::span<const double> trades;   // x_1 .. x_{t-1}
    std::span<const double> noises;   // eta_1 .. eta_t
};

class NoiseProcess {
public:
    virtual ~NoiseProcess() = default;
    virtual double next(const NoiseContext& ctx, Rng& rng) = 0;
    virtual const std::string& descriptor() const = 0;
};

using NoiseFactory = std::function<std::unique_ptr<NoiseProcess>()>;

/// eta identically zero; reduces the noisy market to the exact-state one.
std::unique_ptr<NoiseProcess> zero_noise();

/// Independent symmetric two-sided exponential draw each round, E|eta| = scale.
std::unique_ptr<NoiseProcess> fresh_noise(double scale);

/// Dyadic-tree noise: eta at round m sums one cached two-sided-exponential
/// term (scale 2k/eps) per tree level 0..ceil(log2 m), each term drawn once
/// when its interval first activates and reused while it spans later rounds.
/// Correlated across time, independent of every trade.
std::unique_ptr<NoiseProcess> tree_counter_noise(double eps_per_level,
                                                 double trade_bound);

// Dyadic interval ((index-1)*2^level, index*2^level].
struct DyadicNode {
    int level = 0;
    std::uint64_t index = 0;
    friend bool operator==(const DyadicNode&, const DyadicNode&) = default;
};

/// The level-0..ceil(log2 m) chain of dyadic intervals containing round m;
/// the top interval spans [1, m] entirely. Size is log2(m)+1 at powers of two.
std::vector<DyadicNode> dyadic_cover(std::uint64_t round);

struct NoisyMarketState {
    std::size_t round = 1;
    double q = 0.0;       // true cumulative trade
    double eta = 0.0;     // current noise term
    double qprime = 0.0;  // published state q + eta
};

struct LedgerRow {
    double x = 0.0;        // executed trade
    double q = 0.0;        // true state before the trade
    double eta = 0.0;      // noise in force during the trade
    double qprime = 0.0;   // q + eta, the state the trade was priced at
    double payment = 0.0;  // C(qprime + x) - C(qprime) (+ fee when charged)
};

struct TradeLedger {
    std::vector<LedgerRow> rows;

    double final_q() const {
        return rows.empty() ? 0.0 : rows.back().q + rows.back().x;
    }
    double total_payments() const;
};

/// CSV serialization: header `t,x,q,eta,qprime,payment`, one row per round.
void write_csv(const TradeLedger& ledger, std::ostream& out);

struct StepResult {
    double payment = 0.0;
    NoisyMarketState next;
};

/// One market round: price trade x at the published state, advance the true
/// state, then draw the next noise term. `prior_trades` must end at the trade
/// BEFORE x — x itself is never shown to the noise process. A zero trade
/// executes nothing and pays nothing, fee included.
template <CostFunction C>
StepResult noisy_market_step(const NoisyMarketState& state, double x,
                             const C& cost_fn, double trade_bound,
                             NoiseProcess& noise, double fee, Rng& rng,
                             std::span<const double> prior_trades = {},
                             std::span<const double> prior_noises = {}) {
    if (!(trade_bound > 0.0))
        throw std::domain_error("noisy_market_step: trade bound must be positive");
    if (!(std::abs(x) <= trade_bound))
        throw std::invalid_argument(
            "noisy_market_step: |x| exceeds the trade bound");
    StepResult result;
    result.payment =
        (x == 0.0) ? 0.0 : trade_cost(cost_fn, state.qprime, x) + fee;
    result.next.round = state.round + 1;
    result.next.q = state.q + x;
    result.next.eta =
        noise.next({state.round + 1, prior_trades, prior_noises}, rng);
    result.next.qprime = result.next.q + result.next.eta;
    return result;
}

// Anything that maps (past trades, published states so far) to the next trade.
template <class S>
concept TraderStrategy = requires(S s, std::span<const double> xs,
                                  std::span<const double> qs, Rng& rng) {
    { s.decide(xs, qs, rng) } -> std::convertible_to<double>;
};

/// Runs `rounds` rounds from q_1 = 0. Each round the strategy sees
/// (x_1..x_{t-1}, qprime_1..qprime_t); its trade is rounded toward zero to a
/// multiple of min_unit when min_unit > 0 and rejected if it exceeds the
/// bound. The strategy and the noise process consume independent child
/// streams of `rng`, so the noise path cannot shift with strategy behavior.
template <TraderStrategy S, CostFunction C>
TradeLedger simulate(S&& strategy, NoiseProcess& noise, const C& cost_fn,
                     double trade_bound, std::size_t rounds, double fee,
                     double min_unit, Rng& rng) {
    if (rounds < 1)
        throw std::invalid_argument("simulate: need at least one round");
    if (min_unit < 0.0)
        throw std::invalid_argument("simulate: min_unit must be nonnegative");
    Rng strategy_rng(rng.next_u64());
    Rng noise_rng(rng.next_u64());

    std::vector<double> trades;
    std::vector<double> noises;
    std::vector<double> published;  // qprime_1 .. qprime_t
    trades.reserve(rounds);
    noises.reserve(rounds + 1);
    published.reserve(rounds);

    TradeLedger ledger;
    ledger.rows.reserve(rounds);

    NoisyMarketState state;
    state.eta = noise.next({1, {}, {}}, noise_rng);
    state.qprime = state.q + state.eta;
    noises.push_back(state.eta);

    for (std::size_t t = 1; t <= rounds; ++t) {
        published.push_back(state.qprime);
        double x = strategy.decide(std::span<const double>(trades),
                                   std::span<const double>(published),
                                   strategy_rng);
        if (!(std::abs(x) <= trade_bound))
            throw std::invalid_argument(
                "simulate: strategy emitted a trade beyond the size cap");
        if (min_unit > 0.0) x = std::trunc(x / min_unit) * min_unit;

        trades.push_back(x);
        const auto visible =
            std::span<const double>(trades).first(trades.size() - 1);
        StepResult step =
            noisy_market_step(state, x, cost_fn, trade_bound, noise, fee,
                              noise_rng, visible,
                              std::span<const double>(noises));
        ledger.rows.push_back({x, state.q, state.eta, state.qprime,
                               step.payment});
        noises.push_back(step.next.eta);
        state = step.next;
    }
    return ledger;
}

/// L_T = final true state * 1(outcome=1) - all payments collected. Fees are
/// inside the recorded payments, so they reduce the loss.
double maker_loss(const TradeLedger& ledger, int outcome);

}  // namespace pm
