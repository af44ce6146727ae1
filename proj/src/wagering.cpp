#include "privmarket/wagering.hpp"

#include <cmath>
#include <stdexcept>

namespace pm {

void WagerProfile::validate() const {
    if (reports.size() < 1)
        throw std::invalid_argument("WagerProfile: need at least one bettor");
    if (reports.size() != wagers.size())
        throw std::invalid_argument(
            "WagerProfile: reports and wagers must have equal length");
    for (Eigen::Index i = 0; i < reports.size(); ++i) {
        if (!(reports[i] >= 0.0 && reports[i] <= 1.0))
            throw std::invalid_argument(
                "WagerProfile: reports must lie in [0,1]");
        if (!(wagers[i] >= 0.0) || !std::isfinite(wagers[i]))
            throw std::invalid_argument(
                "WagerProfile: wagers must be finite and nonnegative");
    }
    if (!(wagers.sum() > 0.0))
        throw std::invalid_argument(
            "WagerProfile: at least one wager must be positive");
}

PrivacyParams privacy_params(double epsilon) {
    if (!(epsilon > 0.0))
        throw std::domain_error("privacy_params: epsilon must be positive");
    const double beta = std::exp(-epsilon);
    if (!(beta > 0.0))
        throw std::domain_error(
            "privacy_params: epsilon too large, e^{-epsilon} underflows");
    return {epsilon, 1.0 - beta, beta};
}

ProfitVector wswm_profits(const WagerProfile& profile, const ScoringRule& rule,
                          int outcome) {
    profile.validate();
    const Eigen::ArrayXd s = scores(rule, profile.reports, outcome);
    const double pool = profile.wagers.sum();
    const double weighted_mean = (profile.wagers * s).sum() / pool;
    return {profile.wagers * (s - weighted_mean), ProfitKind::Realized};
}

namespace {
double draw_indicator(double score, const PrivacyParams& params, Rng& rng) {
    const double p_one = (params.alpha * score + params.beta) / (1.0 + params.beta);
    return rng.bernoulli(p_one) ? 1.0 : -params.beta;
}
}  // namespace

ScoreIndicator sample_indicator(const ScoringRule& rule, double report,
                                int outcome, const PrivacyParams& params,
                                Rng& rng) {
    return {draw_indicator(rule.evaluate(report, outcome), params, rng), -1};
}

ProfitVector private_profits(const WagerProfile& profile,
                             const ScoringRule& rule, int outcome,
                             const PrivacyParams& params, Rng& rng) {
    profile.validate();
    const Eigen::ArrayXd s = scores(rule, profile.reports, outcome);
    const double pool = profile.wagers.sum();
    Eigen::ArrayXd indicators(profile.size());
    for (Eigen::Index i = 0; i < profile.size(); ++i)
        indicators[i] = draw_indicator(s[i], params, rng);
    const double noisy_mean = (profile.wagers * indicators).sum() / pool;
    return {profile.wagers * (params.alpha * s - noisy_mean),
            ProfitKind::Realized};
}

ProfitVector expected_private_profits(const WagerProfile& profile,
                                      const ScoringRule& rule, int outcome,
                                      const PrivacyParams& params) {
    ProfitVector result =
        wswm_profits(profile, scaled(rule, params.alpha), outcome);
    result.kind = ProfitKind::Expected;
    return result;
}

std::vector<std::pair<double, double>> expected_profit_curve(
    const WagerProfile& profile, Eigen::Index bettor, double belief,
    const ScoringRule& rule, const PrivacyParams& params,
    const std::vector<double>& grid) {
    profile.validate();
    if (bettor < 0 || bettor >= profile.size())
        throw std::invalid_argument("expected_profit_curve: bettor out of range");
    if (!(belief >= 0.0 && belief <= 1.0))
        throw std::domain_error("expected_profit_curve: belief must lie in [0,1]");
    if (grid.empty())
        throw std::invalid_argument("expected_profit_curve: empty report grid");

    WagerProfile candidate = profile;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(grid.size());
    for (const double report : grid) {
        candidate.reports[bettor] = report;
        const double up =
            expected_private_profits(candidate, rule, 1, params).values[bettor];
        const double down =
            expected_private_profits(candidate, rule, 0, params).values[bettor];
        curve.emplace_back(report, belief * up + (1.0 - belief) * down);
    }
    return curve;
}

Eigen::ArrayXd concentration_bound(const Eigen::ArrayXd& wagers,
                                   const PrivacyParams& params, double delta) {
    if (!(delta > 0.0 && delta <= 1.0))
        throw std::domain_error("concentration_bound: delta must lie in (0,1]");
    const double l1 = wagers.sum();
    if (!(l1 > 0.0))
        throw std::invalid_argument(
            "concentration_bound: at least one wager must be positive");
    const double l2 = std::sqrt((wagers * wagers).sum());
    const double common = (l2 / l1) * (1.0 + params.beta) *
                          std::sqrt(std::log(2.0 / delta) / 2.0);
    return wagers * common;
}

double private_wager_alpha(double wager_floor, double wager_cap, int bettors,
                           double epsilon) {
    if (!(wager_floor > 0.0) || !(wager_cap >= wager_floor))
        throw std::domain_error(
            "private_wager_alpha: need 0 < wager floor <= wager cap");
    if (bettors < 1)
        throw std::domain_error("private_wager_alpha: need at least one bettor");
    if (!(epsilon > 0.0))
        throw std::domain_error("private_wager_alpha: epsilon must be positive");
    return (wager_floor / wager_cap) *
           (1.0 - std::exp(-epsilon / static_cast<double>(bettors)));
}

}  // namespace pm
