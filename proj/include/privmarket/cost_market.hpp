#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pm {

// Convex potential with analytic derivative. price() must be the exact
// derivative of cost(); the finite-difference agreement is checked in tests,
// never substituted for the analytic form.
template <class C>
concept CostFunction = requires(const C& c, double q) {
    { c.cost(q) } -> std::convertible_to<double>;
    { c.price(q) } -> std::convertible_to<double>;
};

/// b log(e^{(q+a)/b} + 1) in softplus form: for z = (q+a)/b > 0 the value is
/// q + a + b log1p(e^{-z}), so large states neither overflow nor lose the tail.
template <class Scalar = double>
Scalar lmsr_cost(Scalar q, Scalar b, Scalar a = Scalar(0)) {
    if (!(b > Scalar(0)))
        throw std::domain_error("lmsr_cost: liquidity must be positive");
    const Scalar z = (q + a) / b;
    if (z > Scalar(0)) return q + a + b * std::log1p(std::exp(-z));
    return b * std::log1p(std::exp(z));
}

/// e^{(q+a)/b} / (e^{(q+a)/b} + 1); strictly inside (0,1) and increasing in q.
template <class Scalar = double>
Scalar lmsr_price(Scalar q, Scalar b, Scalar a = Scalar(0)) {
    if (!(b > Scalar(0)))
        throw std::domain_error("lmsr_price: liquidity must be positive");
    const Scalar z = (q + a) / b;
    if (z > Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-z));
    const Scalar e = std::exp(z);
    return e / (Scalar(1) + e);
}

template <class Scalar = double>
struct LmsrT {
    Scalar b{100};  // liquidity: rate at which prices move
    Scalar a{0};    // shift: sets the state-0 price

    LmsrT() = default;
    LmsrT(Scalar liquidity, Scalar shift) : b(liquidity), a(shift) {
        if (!(b > Scalar(0)))
            throw std::domain_error("LmsrT: liquidity must be positive");
    }

    Scalar cost(Scalar q) const { return lmsr_cost(q, b, a); }
    Scalar price(Scalar q) const { return lmsr_price(q, b, a); }
};

using Lmsr = LmsrT<double>;

/// Cost of trading x shares at state q: C(q+x) - C(q).
double trade_cost(const CostFunction auto& c, double q, double x) {
    return c.cost(q + x) - c.cost(q);
}

/// D_C(p, q) = C(p) - C(q) - C'(q)(p - q); nonnegative by convexity.
double bregman(const CostFunction auto& c, double p, double q) {
    return c.cost(p) - c.cost(q) - c.price(q) * (p - q);
}

/// Smallest divergence reachable by a move of gamma away from center,
/// min(D_C(center+gamma, center), D_C(center-gamma, center)). Strictly
/// positive only where the cost function is nonlinear; a zero value is
/// rejected since every result built on it degenerates.
double divergence_floor(const CostFunction auto& c, double center,
                        double gamma) {
    if (!(gamma > 0.0))
        throw std::domain_error("divergence_floor: gamma must be positive");
    const double floor = std::min(bregman(c, center + gamma, center),
                                  bregman(c, center - gamma, center));
    if (!(floor > 0.0))
        throw std::domain_error(
            "divergence_floor: cost function is linear around center");
    return floor;
}

struct MarketRound {
    double x = 0.0;        // shares traded
    double q = 0.0;        // state before the trade
    double payment = 0.0;  // C(q+x) - C(q)
};

struct MarketLedger {
    std::vector<MarketRound> rounds;
    double final_state = 0.0;  // sum of all trades
};

/// Runs the exact-state market over a trade sequence. The returned loss is
/// final_state * 1(outcome=1) - (C(final_state) - C(0)); payouts telescope,
/// so for the softplus cost with a = 0 it never exceeds b log 2.
template <CostFunction C>
std::pair<MarketLedger, double> run_standard_market(
    std::span<const double> trades, const C& cost_fn, int outcome) {
    if (outcome != 0 && outcome != 1)
        throw std::domain_error("run_standard_market: outcome must be 0 or 1");
    MarketLedger ledger;
    ledger.rounds.reserve(trades.size());
    double q = 0.0;
    for (const double x : trades) {
        ledger.rounds.push_back({x, q, trade_cost(cost_fn, q, x)});
        q += x;
    }
    ledger.final_state = q;
    const double collected = cost_fn.cost(q) - cost_fn.cost(0.0);
    const double loss = (outcome == 1 ? q : 0.0) - collected;
    return {std::move(ledger), loss};
}

}  // namespace pm
