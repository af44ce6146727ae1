#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace pm {

/// Brier score 1 - (p - omega)^2; range [0,1], strictly proper.
template <class Scalar = double>
Scalar brier_score(Scalar report, int outcome) {
    if (!(report >= Scalar(0) && report <= Scalar(1)))
        throw std::domain_error("brier_score: report must lie in [0,1]");
    if (outcome != 0 && outcome != 1)
        throw std::domain_error("brier_score: outcome must be 0 or 1");
    const Scalar d = report - Scalar(outcome);
    return Scalar(1) - d * d;
}

// A bounded strictly proper scoring rule with range [0,1]. Any bounded rule
// can be rescaled into this range before wrapping. evaluate() rejects
// out-of-domain inputs and rules that leave [0,1].
class ScoringRule {
public:
    using Fn = std::function<double(double report, int outcome)>;

    ScoringRule(std::string name, Fn fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}

    double evaluate(double report, int outcome) const {
        if (!(report >= 0.0 && report <= 1.0))
            throw std::domain_error("ScoringRule: report must lie in [0,1]");
        if (outcome != 0 && outcome != 1)
            throw std::domain_error("ScoringRule: outcome must be 0 or 1");
        const double s = fn_(report, outcome);
        if (!(s >= 0.0 && s <= 1.0))
            throw std::domain_error("ScoringRule: '" + name_ +
                                    "' produced a score outside [0,1]");
        return s;
    }

    const std::string& name() const { return name_; }

private:
    std::string name_;
    Fn fn_;
};

/// The canonical shipped rule.
ScoringRule brier();

/// rule scaled by factor in [0,1]; still proper, range [0, factor].
ScoringRule scaled(const ScoringRule& rule, double factor);

/// p_belief * s(report,1) + (1 - p_belief) * s(report,0).
double expected_score(const ScoringRule& rule, double report, double belief);

/// Elementwise evaluation over a report vector.
Eigen::ArrayXd scores(const ScoringRule& rule, const Eigen::ArrayXd& reports,
                      int outcome);

/// Uniform grid over [0,1] with the given step (both endpoints included).
std::vector<double> report_grid(double step);

}  // namespace pm
