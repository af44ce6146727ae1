#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "privmarket/wagering.hpp"

namespace pm {

// Finite pmf over scalar support values.
struct DiscreteDistribution {
    Eigen::ArrayXd support;
    Eigen::ArrayXd prob;

    double mean() const { return (support * prob).sum(); }
    void validate() const;  // nonnegative, sums to 1 within 1e-12, support distinct
};

// One realization of the joint profit law. Atoms are keyed by the indicator
// draw that produced them, not by profit-vector equality: distinct draws can
// collide numerically in profit space and must not be merged.
struct ProfitAtom {
    std::uint32_t indicator_mask = 0;  // bit j set: bettor j drew 1, else -beta
    Eigen::ArrayXd profits;
    double prob = 0.0;
};

struct ProfitDistribution {
    std::vector<ProfitAtom> atoms;

    Eigen::ArrayXd mean() const;
    double total_prob() const;
};

// Enumeration works through all 2^n indicator vectors; exactness over scale.
inline constexpr Eigen::Index kEnumerationCap = 15;

/// Exact two-point pmf of the score indicator, support (1, -beta).
DiscreteDistribution indicator_distribution(const ScoringRule& rule,
                                            double report, int outcome,
                                            const PrivacyParams& params);

/// Largest probability ratio (both directions) between the indicator laws of
/// two reports; at most e^epsilon.
double indicator_dp_ratio(const ScoringRule& rule, double report_a,
                          double report_b, int outcome,
                          const PrivacyParams& params);

/// Exact joint pmf of the randomized profit vector over all 2^n indicator
/// draws. Requires n <= kEnumerationCap.
ProfitDistribution exact_profit_distribution(const WagerProfile& profile,
                                             const ScoringRule& rule,
                                             int outcome,
                                             const PrivacyParams& params);

/// Certified worst-case event ratio between the profit laws delivered to
/// everyone but `bettor` when that bettor's report changes to
/// alternate_report: the maximum over all enumeration atoms of the
/// probability ratio, taken in both directions. Atoms shared between the two
/// laws carry identical profit values, so this maximum upper-bounds the
/// supremum over observable events and equals it when no atoms collide.
double joint_dp_certificate(const WagerProfile& profile, Eigen::Index bettor,
                            double alternate_report, const ScoringRule& rule,
                            int outcome, const PrivacyParams& params);

// Side-by-side worst-case ratios for the deterministic weighted-score payout
// and the randomized one on the same instance. The deterministic mechanism
// maps neighboring reports to disjoint singleton profit laws, so its ratio is
// infinite whenever the outputs differ at all.
struct TensionReport {
    Eigen::Index bettor = 0;
    double report_a = 0.0;
    double report_b = 0.0;
    double wswm_ratio = 1.0;     // +inf when the deterministic outputs differ
    double private_ratio = 1.0;  // certified <= privacy_cap
    double privacy_cap = 1.0;    // e^epsilon
};

TensionReport budget_balance_privacy_tension(const WagerProfile& profile,
                                             const ScoringRule& rule,
                                             int outcome,
                                             const PrivacyParams& params,
                                             Eigen::Index bettor = 0,
                                             double report_a = 0.9,
                                             double report_b = 0.1);

}  // namespace pm
