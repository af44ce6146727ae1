#include "privmarket/noisy_market.hpp"

#include <bit>
#include <cstdio>
#include <map>

namespace pm {

double TradeLedger::total_payments() const {
    double total = 0.0;
    for (const LedgerRow& row : rows) total += row.payment;
    return total;
}

double maker_loss(const TradeLedger& ledger, int outcome) {
    if (outcome != 0 && outcome != 1)
        throw std::domain_error("maker_loss: outcome must be 0 or 1");
    const double payout = outcome == 1 ? ledger.final_q() : 0.0;
    return payout - ledger.total_payments();
}

void write_csv(const TradeLedger& ledger, std::ostream& out) {
    out << "t,x,q,eta,qprime,payment\n";
    char line[160];
    for (std::size_t t = 0; t < ledger.rows.size(); ++t) {
        const LedgerRow& r = ledger.rows[t];
        std::snprintf(line, sizeof line, "%zu,%.12g,%.12g,%.12g,%.12g,%.12g\n",
                      t + 1, r.x, r.q, r.eta, r.qprime, r.payment);
        out << line;
    }
}

std::vector<DyadicNode> dyadic_cover(std::uint64_t round) {
    if (round == 0)
        throw std::invalid_argument("dyadic_cover: rounds start at 1");
    const int top = static_cast<int>(std::bit_width(round - 1));
    std::vector<DyadicNode> nodes;
    nodes.reserve(static_cast<std::size_t>(top) + 1);
    for (int level = 0; level <= top; ++level) {
        const std::uint64_t width = std::uint64_t{1} << level;
        nodes.push_back({level, (round + width - 1) >> level});
    }
    return nodes;
}

namespace {

class ZeroNoise final : public NoiseProcess {
public:
    double next(const NoiseContext&, Rng&) override { return 0.0; }
    const std::string& descriptor() const override { return name_; }

private:
    std::string name_ = "none";
};

class FreshNoise final : public NoiseProcess {
public:
    explicit FreshNoise(double scale) : scale_(scale) {
        name_ = "fresh(scale=" + std::to_string(scale_) + ")";
    }
    double next(const NoiseContext&, Rng& rng) override {
        return rng.laplace(scale_);
    }
    const std::string& descriptor() const override { return name_; }

private:
    double scale_;
    std::string name_;
};

class TreeCounterNoise final : public NoiseProcess {
public:
    TreeCounterNoise(double eps_per_level, double trade_bound)
        : term_scale_(2.0 * trade_bound / eps_per_level) {
        name_ = "tree(eps=" + std::to_string(eps_per_level) +
                ",k=" + std::to_string(trade_bound) + ")";
    }

    double next(const NoiseContext& ctx, Rng& rng) override {
        double sum = 0.0;
        for (const DyadicNode& node : dyadic_cover(ctx.round)) {
            auto [it, inserted] =
                terms_.try_emplace({node.level, node.index}, 0.0);
            if (inserted) it->second = rng.laplace(term_scale_);
            sum += it->second;
        }
        return sum;
    }

    const std::string& descriptor() const override { return name_; }

private:
    double term_scale_;  // 2k/eps per interval
    std::map<std::pair<int, std::uint64_t>, double> terms_;
    std::string name_;
};

}  // namespace

std::unique_ptr<NoiseProcess> zero_noise() {
    return std::make_unique<ZeroNoise>();
}

std::unique_ptr<NoiseProcess> fresh_noise(double scale) {
    if (!(scale > 0.0))
        throw std::domain_error("fresh_noise: scale must be positive");
    return std::make_unique<FreshNoise>(scale);
}

std::unique_ptr<NoiseProcess> tree_counter_noise(double eps_per_level,
                                                 double trade_bound) {
    if (!(eps_per_level > 0.0))
        throw std::domain_error("tree_counter_noise: eps must be positive");
    if (!(trade_bound > 0.0))
        throw std::domain_error(
            "tree_counter_noise: trade bound must be positive");
    return std::make_unique<TreeCounterNoise>(eps_per_level, trade_bound);
}

}  // namespace pm
