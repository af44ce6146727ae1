#include "privmarket/scoring.hpp"

#include <cmath>

namespace pm {

ScoringRule brier() {
    return {"brier", [](double p, int w) { return brier_score(p, w); }};
}

ScoringRule scaled(const ScoringRule& rule, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0))
        throw std::domain_error("scaled: factor must lie in [0,1]");
    return {rule.name() + "*" + std::to_string(factor),
            [rule, factor](double p, int w) {
                return factor * rule.evaluate(p, w);
            }};
}

double expected_score(const ScoringRule& rule, double report, double belief) {
    if (!(belief >= 0.0 && belief <= 1.0))
        throw std::domain_error("expected_score: belief must lie in [0,1]");
    return belief * rule.evaluate(report, 1) +
           (1.0 - belief) * rule.evaluate(report, 0);
}

Eigen::ArrayXd scores(const ScoringRule& rule, const Eigen::ArrayXd& reports,
                      int outcome) {
    Eigen::ArrayXd out(reports.size());
    for (Eigen::Index i = 0; i < reports.size(); ++i)
        out[i] = rule.evaluate(reports[i], outcome);
    return out;
}

std::vector<double> report_grid(double step) {
    if (!(step > 0.0 && step <= 1.0))
        throw std::domain_error("report_grid: step must lie in (0,1]");
    std::vector<double> grid;
    const auto points = static_cast<std::size_t>(std::llround(1.0 / step));
    grid.reserve(points + 1);
    for (std::size_t i = 0; i <= points; ++i)
        grid.push_back(std::min(1.0, static_cast<double>(i) * step));
    return grid;
}

}  // namespace pm
