#include "privmarket/dp_audit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pm {

void DiscreteDistribution::validate() const {
    if (support.size() != prob.size() || support.size() < 1)
        throw std::invalid_argument(
            "DiscreteDistribution: support/probability size mismatch");
    double total = 0.0;
    for (Eigen::Index i = 0; i < prob.size(); ++i) {
        if (!(prob[i] >= 0.0))
            throw std::invalid_argument(
                "DiscreteDistribution: negative probability");
        total += prob[i];
        for (Eigen::Index j = i + 1; j < support.size(); ++j)
            if (support[i] == support[j])
                throw std::invalid_argument(
                    "DiscreteDistribution: support entries must be distinct");
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw std::invalid_argument(
            "DiscreteDistribution: probabilities must sum to 1");
}

Eigen::ArrayXd ProfitDistribution::mean() const {
    if (atoms.empty()) return {};
    Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(atoms.front().profits.size());
    for (const ProfitAtom& atom : atoms) acc += atom.prob * atom.profits;
    return acc;
}

double ProfitDistribution::total_prob() const {
    double total = 0.0;
    for (const ProfitAtom& atom : atoms) total += atom.prob;
    return total;
}

DiscreteDistribution indicator_distribution(const ScoringRule& rule,
                                            double report, int outcome,
                                            const PrivacyParams& params) {
    const double s = rule.evaluate(report, outcome);
    DiscreteDistribution dist;
    dist.support = Eigen::ArrayXd(2);
    dist.prob = Eigen::ArrayXd(2);
    dist.support << 1.0, -params.beta;
    const double p_one = (params.alpha * s + params.beta) / (1.0 + params.beta);
    dist.prob << p_one, 1.0 - p_one;
    return dist;
}

double indicator_dp_ratio(const ScoringRule& rule, double report_a,
                          double report_b, int outcome,
                          const PrivacyParams& params) {
    const DiscreteDistribution a =
        indicator_distribution(rule, report_a, outcome, params);
    const DiscreteDistribution b =
        indicator_distribution(rule, report_b, outcome, params);
    double worst = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
        worst = std::max(worst, a.prob[i] / b.prob[i]);
        worst = std::max(worst, b.prob[i] / a.prob[i]);
    }
    return worst;
}

namespace {

// Per-bettor probability of drawing the indicator value 1.
Eigen::ArrayXd one_probabilities(const WagerProfile& profile,
                                 const ScoringRule& rule, int outcome,
                                 const PrivacyParams& params) {
    const Eigen::ArrayXd s = scores(rule, profile.reports, outcome);
    return (params.alpha * s + params.beta) / (1.0 + params.beta);
}

void check_enumeration_cap(Eigen::Index n) {
    if (n > kEnumerationCap)
        throw std::invalid_argument(
            "exact enumeration is capped at " +
            std::to_string(kEnumerationCap) + " bettors");
}

}  // namespace

ProfitDistribution exact_profit_distribution(const WagerProfile& profile,
                                             const ScoringRule& rule,
                                             int outcome,
                                             const PrivacyParams& params) {
    profile.validate();
    const Eigen::Index n = profile.size();
    check_enumeration_cap(n);

    const Eigen::ArrayXd s = scores(rule, profile.reports, outcome);
    const Eigen::ArrayXd p_one = one_probabilities(profile, rule, outcome, params);
    const double pool = profile.wagers.sum();
    const Eigen::ArrayXd base = params.alpha * s;

    ProfitDistribution dist;
    dist.atoms.reserve(std::size_t{1} << n);
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << n); ++mask) {
        double prob = 1.0;
        double weighted = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const bool one = (mask >> j) & 1u;
            prob *= one ? p_one[j] : 1.0 - p_one[j];
            weighted += profile.wagers[j] * (one ? 1.0 : -params.beta);
        }
        const double noisy_mean = weighted / pool;
        dist.atoms.push_back(
            {mask, profile.wagers * (base - noisy_mean), prob});
    }
    return dist;
}

double joint_dp_certificate(const WagerProfile& profile, Eigen::Index bettor,
                            double alternate_report, const ScoringRule& rule,
                            int outcome, const PrivacyParams& params) {
    profile.validate();
    if (bettor < 0 || bettor >= profile.size())
        throw std::invalid_argument("joint_dp_certificate: bettor out of range");
    check_enumeration_cap(profile.size());

    WagerProfile alternate = profile;
    alternate.reports[bettor] = alternate_report;
    const ProfitDistribution original =
        exact_profit_distribution(profile, rule, outcome, params);
    const ProfitDistribution changed =
        exact_profit_distribution(alternate, rule, outcome, params);

    // Atom masks line up index-for-index; the profits delivered to everyone
    // but `bettor` are identical per mask, only probabilities move.
    double worst = 0.0;
    for (std::size_t i = 0; i < original.atoms.size(); ++i) {
        const double pa = original.atoms[i].prob;
        const double pb = changed.atoms[i].prob;
        worst = std::max(worst, pa / pb);
        worst = std::max(worst, pb / pa);
    }
    return worst;
}

TensionReport budget_balance_privacy_tension(const WagerProfile& profile,
                                             const ScoringRule& rule,
                                             int outcome,
                                             const PrivacyParams& params,
                                             Eigen::Index bettor,
                                             double report_a, double report_b) {
    profile.validate();
    if (bettor < 0 || bettor >= profile.size())
        throw std::invalid_argument(
            "budget_balance_privacy_tension: bettor out of range");

    WagerProfile with_a = profile;
    with_a.reports[bettor] = report_a;
    WagerProfile with_b = profile;
    with_b.reports[bettor] = report_b;

    // The deterministic mechanism puts all mass on a single profit vector;
    // any difference in what the others receive is a likelihood ratio of
    // infinity, no finite privacy parameter covers it.
    const Eigen::ArrayXd pa = wswm_profits(with_a, rule, outcome).values;
    const Eigen::ArrayXd pb = wswm_profits(with_b, rule, outcome).values;
    bool identical = true;
    for (Eigen::Index j = 0; j < profile.size(); ++j) {
        if (j == bettor) continue;
        if (pa[j] != pb[j]) identical = false;
    }

    TensionReport report;
    report.bettor = bettor;
    report.report_a = report_a;
    report.report_b = report_b;
    report.wswm_ratio =
        identical ? 1.0 : std::numeric_limits<double>::infinity();
    report.private_ratio =
        joint_dp_certificate(with_a, bettor, report_b, rule, outcome, params);
    report.privacy_cap = std::exp(params.epsilon);
    return report;
}

}  // namespace pm
