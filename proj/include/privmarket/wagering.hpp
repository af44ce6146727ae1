#pragma once

#include <utility>
#include <vector>

#include <Eigen/Core>

#include "privmarket/random.hpp"
#include "privmarket/scoring.hpp"

namespace pm {

// One event's worth of reports p_i in [0,1] and nonnegative wagers m_i.
// Individual bettors may sit out with m_i = 0, but the total wagered mass
// must be positive (the weighted score average divides by it).
struct WagerProfile {
    Eigen::ArrayXd reports;
    Eigen::ArrayXd wagers;

    WagerProfile() = default;
    WagerProfile(Eigen::ArrayXd reports_in, Eigen::ArrayXd wagers_in)
        : reports(std::move(reports_in)), wagers(std::move(wagers_in)) {
        validate();
    }

    Eigen::Index size() const { return reports.size(); }
    void validate() const;  // throws std::invalid_argument
};

// alpha = 1 - e^{-epsilon}, beta = e^{-epsilon}; alpha + beta = 1 exactly.
struct PrivacyParams {
    double epsilon = 0.0;
    double alpha = 0.0;
    double beta = 1.0;
};

PrivacyParams privacy_params(double epsilon);

enum class ProfitKind { Realized, Expected };

struct ProfitVector {
    Eigen::ArrayXd values;
    ProfitKind kind = ProfitKind::Realized;

    double sum() const { return values.sum(); }
};

// Two-point score surrogate: 1 or -beta, with mean alpha * s(p, omega).
struct ScoreIndicator {
    double value = 0.0;
    Eigen::Index owner = -1;
};

/// Weighted-score profits: Pi_i = m_i (s_i - sum_j m_j s_j / sum_j m_j).
/// Budget balanced for every outcome.
ProfitVector wswm_profits(const WagerProfile& profile, const ScoringRule& rule,
                          int outcome);

/// Draws 1 with probability (alpha s + beta)/(1 + beta), else -beta, with
/// s = rule.evaluate(report, outcome). The mean is alpha * s.
ScoreIndicator sample_indicator(const ScoringRule& rule, double report,
                                int outcome, const PrivacyParams& params,
                                Rng& rng);

/// Randomized-payment profits: Pi_i = m_i (alpha s_i - sum_j m_j x_j / sum_j m_j)
/// with one independent indicator x_j per bettor. Pi_i >= -m_i always.
ProfitVector private_profits(const WagerProfile& profile,
                             const ScoringRule& rule, int outcome,
                             const PrivacyParams& params, Rng& rng);

/// Closed-form expectation of private_profits: the weighted-score profits
/// under the rescaled rule alpha*s (no sampling).
ProfitVector expected_private_profits(const WagerProfile& profile,
                                      const ScoringRule& rule, int outcome,
                                      const PrivacyParams& params);

/// For each candidate report r in grid, bettor's expected profit under
/// belief: belief * E[Pi_i | omega=1, p_i=r] + (1-belief) * E[Pi_i | omega=0, p_i=r].
std::vector<std::pair<double, double>> expected_profit_curve(
    const WagerProfile& profile, Eigen::Index bettor, double belief,
    const ScoringRule& rule, const PrivacyParams& params,
    const std::vector<double>& grid);

/// Per-bettor deviation bound m_i (|m|_2/|m|_1)(1+beta) sqrt(ln(2/delta)/2):
/// holds for all bettors simultaneously with probability at least 1 - delta.
Eigen::ArrayXd concentration_bound(const Eigen::ArrayXd& wagers,
                                   const PrivacyParams& params, double delta);

/// Score scale (L/U)(1 - e^{-epsilon/n}) that a wager-private variant would
/// need with wagers confined to [L, U]. Diagnostic only.
double private_wager_alpha(double wager_floor, double wager_cap, int bettors,
                           double epsilon);

}  // namespace pm
