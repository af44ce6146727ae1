// Experiment driver: one-shot wagering demos, exhaustive joint-DP audits,
// profit concentration trials, noisy-market loss curves, and empirical
// privacy probes. Every subcommand is deterministic for a fixed --seed and
// emits plain CSV (and JSON for the wager demo) under --out.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "privmarket/adversary.hpp"
#include "privmarket/cost_market.hpp"
#include "privmarket/dp_audit.hpp"
#include "privmarket/noisy_market.hpp"
#include "privmarket/parallel.hpp"
#include "privmarket/random.hpp"
#include "privmarket/scoring.hpp"
#include "privmarket/wagering.hpp"

namespace {

namespace fs = std::filesystem;

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + (dir / name).string());
    return out;
}

struct Common {
    std::uint64_t seed = 0;
    std::string out = ".";
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--seed", common.seed, "random seed (mandatory)")
        ->required();
    cmd->add_option("--out", common.out, "output directory")
        ->capture_default_str();
}

pm::NoiseFactory make_noise_factory(const std::string& kind, double scale,
                                    double eps, double trade_bound) {
    if (kind == "none") return [] { return pm::zero_noise(); };
    if (kind == "fresh") return [scale] { return pm::fresh_noise(scale); };
    if (kind == "tree")
        return [eps, trade_bound] {
            return pm::tree_counter_noise(eps, trade_bound);
        };
    throw std::invalid_argument("unknown noise kind: " + kind);
}

// ---------------------------------------------------------------- wager-demo

int run_wager_demo(const Common& common, int n, double epsilon) {
    if (n < 1) throw std::invalid_argument("--n must be at least 1");
    pm::Rng rng(common.seed);
    Eigen::ArrayXd reports(n), wagers(n);
    for (int i = 0; i < n; ++i) {
        reports[i] = rng.uniform01();
        wagers[i] = rng.uniform(0.5, 2.0);
    }
    const pm::WagerProfile profile(std::move(reports), std::move(wagers));
    const pm::PrivacyParams params = pm::privacy_params(epsilon);
    const pm::ScoringRule rule = pm::brier();
    const int omega = 1;

    const pm::ProfitVector base = pm::wswm_profits(profile, rule, omega);
    const pm::ProfitVector expected =
        pm::expected_private_profits(profile, rule, omega, params);
    const pm::ProfitVector realized =
        pm::private_profits(profile, rule, omega, params, rng);

    std::ofstream csv = open_out(common.out, "profits.csv");
    csv << "bettor,report,wager,wswm_profit,private_expected,private_realized\n";
    for (int i = 0; i < n; ++i) {
        csv << i << ',' << fmt_num(profile.reports[i]) << ','
            << fmt_num(profile.wagers[i]) << ',' << fmt_num(base.values[i])
            << ',' << fmt_num(expected.values[i]) << ','
            << fmt_num(realized.values[i]) << '\n';
    }

    nlohmann::json summary{
        {"n", n},
        {"seed", common.seed},
        {"epsilon", epsilon},
        {"alpha", params.alpha},
        {"beta", params.beta},
        {"omega", omega},
        {"wswm_balance_residual", std::abs(base.sum())},
        {"expected_balance_residual", std::abs(expected.sum())},
        {"private_realized_sum", realized.sum()},
        {"expectation_scaling_gap",
         (expected.values - params.alpha * base.values).abs().maxCoeff()},
    };
    std::ofstream js = open_out(common.out, "summary.json");
    js << summary.dump(2) << '\n';
    return 0;
}

// ------------------------------------------------------------------ dp-audit

int run_dp_audit(const Common& common, int n, double epsilon, int trials) {
    if (n < 2) throw std::invalid_argument("--n must be at least 2");
    if (n > pm::kEnumerationCap)
        throw std::invalid_argument("--n exceeds the exact-enumeration cap");
    const pm::PrivacyParams params = pm::privacy_params(epsilon);
    const pm::ScoringRule rule = pm::brier();
    const double cap = std::exp(epsilon);

    std::ofstream csv = open_out(common.out, "dp_audit.csv");
    csv << "case,bettor,p,p_alt,omega,ratio,eps_bound\n";

    double worst = 0.0;
    bool breached = false;
    const auto emit = [&](int case_id, Eigen::Index bettor, double p,
                          double alt, int omega, double ratio) {
        csv << case_id << ',' << bettor << ',' << fmt_num(p) << ','
            << fmt_num(alt) << ',' << omega << ',' << fmt_num(ratio) << ','
            << fmt_num(cap) << '\n';
        worst = std::max(worst, ratio);
        breached |= ratio > cap + 1e-9;
    };

    // case 0: extremal scores, the tight instance
    {
        Eigen::ArrayXd reports = Eigen::ArrayXd::Constant(n, 0.5);
        reports[0] = 1.0;
        const pm::WagerProfile tight(std::move(reports),
                                     Eigen::ArrayXd::Constant(n, 1.0));
        emit(0, 0, 1.0, 0.0, 1,
             pm::joint_dp_certificate(tight, 0, 0.0, rule, 1, params));
    }
    for (int c = 1; c <= trials; ++c) {
        pm::Rng rng(pm::derive_seed(common.seed, static_cast<std::uint64_t>(c)));
        Eigen::ArrayXd reports(n), wagers(n);
        for (int i = 0; i < n; ++i) {
            reports[i] = rng.uniform01();
            wagers[i] = rng.uniform(0.1, 2.0);
        }
        const pm::WagerProfile profile(std::move(reports), std::move(wagers));
        const auto bettor =
            static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        const double alt = rng.uniform01();
        const int omega = rng.bernoulli(0.5) ? 1 : 0;
        emit(c, bettor, profile.reports[bettor], alt, omega,
             pm::joint_dp_certificate(profile, bettor, alt, rule, omega, params));
    }

    std::cout << "dp-audit: worst ratio " << fmt_num(worst) << " against bound "
              << fmt_num(cap) << (breached ? " BREACHED\n" : " ok\n");
    return breached ? 1 : 0;
}

// ------------------------------------------------------------- concentration

int run_concentration(const Common& common, const std::vector<int>& ns,
                      double epsilon, double delta, int trials) {
    if (trials < 1) throw std::invalid_argument("--trials must be positive");
    const pm::PrivacyParams params = pm::privacy_params(epsilon);
    const pm::ScoringRule rule = pm::brier();

    std::ofstream csv = open_out(common.out, "concentration.csv");
    csv << "n,bound,violation_rate,delta\n";

    for (std::size_t group = 0; group < ns.size(); ++group) {
        const int n = ns[group];
        if (n < 1) throw std::invalid_argument("--n entries must be positive");
        pm::Rng setup(pm::derive_seed(common.seed, 0x10000 + group));
        Eigen::ArrayXd reports(n);
        for (int i = 0; i < n; ++i) reports[i] = setup.uniform01();
        const pm::WagerProfile profile(std::move(reports),
                                       Eigen::ArrayXd::Constant(n, 1.0));
        const int omega = 1;
        const Eigen::ArrayXd expected =
            pm::expected_private_profits(profile, rule, omega, params).values;
        const Eigen::ArrayXd bound =
            pm::concentration_bound(profile.wagers, params, delta);

        std::vector<std::uint8_t> violated(trials, 0);
        pm::parallel_for_index(static_cast<std::size_t>(trials), [&](std::size_t t) {
            pm::Rng rng(pm::derive_seed(common.seed,
                                        (group << 40) ^ (0x20000 + t)));
            const Eigen::ArrayXd pi =
                pm::private_profits(profile, rule, omega, params, rng).values;
            violated[t] = ((pi - expected).abs() > bound + 1e-12).any() ? 1 : 0;
        });
        std::size_t count = 0;
        for (const std::uint8_t v : violated) count += v;
        const double rate = static_cast<double>(count) / trials;
        csv << n << ',' << fmt_num(bound[0]) << ',' << fmt_num(rate) << ','
            << fmt_num(delta) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------- loss-curve

int run_loss_curve(const Common& common, const std::vector<std::size_t>& rounds,
                   int trials, double b, double a, double k, double qstar,
                   double gamma, const std::string& noise_kind,
                   double noise_scale, double epsilon, double fee,
                   double min_unit) {
    if (trials < 2) throw std::invalid_argument("--trials must be at least 2");
    const pm::Lmsr market{b, a};
    const pm::NoiseFactory factory =
        make_noise_factory(noise_kind, noise_scale, epsilon, k);
    const double floor = pm::divergence_floor(market, qstar, gamma);
    const double target_price = market.price(qstar);

    std::ofstream csv = open_out(common.out, "loss_curve.csv");
    csv << "T,mean_loss,ci_low,ci_high,lemma3_bound\n";

    for (std::size_t ti = 0; ti < rounds.size(); ++ti) {
        const std::size_t horizon = rounds[ti];
        std::vector<double> losses(trials, 0.0);
        std::vector<double> displaced(trials, 0.0);
        pm::parallel_for_index(static_cast<std::size_t>(trials), [&](std::size_t i) {
            pm::Rng rng(pm::derive_seed(common.seed, (ti << 40) ^ i));
            auto noise = factory();
            const pm::TradeLedger ledger =
                pm::simulate(pm::target_strategy(qstar, k), *noise, market, k,
                             horizon, fee, min_unit, rng);
            const int omega = rng.bernoulli(target_price) ? 1 : 0;
            losses[i] = pm::maker_loss(ledger, omega);
            double out_rounds = 0.0;
            for (const pm::LedgerRow& row : ledger.rows)
                if (std::abs(row.qprime - qstar) >= gamma) out_rounds += 1.0;
            displaced[i] = out_rounds;
        });
        double mean = 0.0, displaced_mean = 0.0;
        for (int i = 0; i < trials; ++i) {
            mean += losses[i];
            displaced_mean += displaced[i];
        }
        mean /= trials;
        displaced_mean /= trials;
        double var = 0.0;
        for (int i = 0; i < trials; ++i)
            var += (losses[i] - mean) * (losses[i] - mean);
        var /= trials - 1;
        const double half = 1.96 * std::sqrt(var / trials);
        csv << horizon << ',' << fmt_num(mean) << ',' << fmt_num(mean - half)
            << ',' << fmt_num(mean + half) << ','
            << fmt_num(floor * displaced_mean) << '\n';
    }
    return 0;
}

// ------------------------------------------------------------- privacy-probe

int run_privacy_probe(const Common& common,
                      const std::vector<std::size_t>& rounds, int trials,
                      double b, double a, double k, double qstar,
                      const std::string& noise_kind, double noise_scale,
                      double epsilon) {
    const pm::Lmsr market{b, a};
    const pm::NoiseFactory factory =
        make_noise_factory(noise_kind, noise_scale, epsilon, k);

    std::ofstream csv = open_out(common.out, "privacy_probe.csv");
    csv << "t,p1,p2,implied_eps,ci_low,ci_high\n";
    for (std::size_t ri = 0; ri < rounds.size(); ++ri) {
        const pm::ProbeResult probe = pm::privacy_probe(
            market, factory, k, qstar, rounds[ri],
            static_cast<std::size_t>(trials),
            pm::derive_seed(common.seed, 0x50000 + ri));
        csv << rounds[ri] << ',' << fmt_num(probe.p1) << ','
            << fmt_num(probe.p2) << ',' << fmt_num(probe.implied_eps) << ','
            << fmt_num(probe.ci_low) << ',' << fmt_num(probe.ci_high) << '\n';
        std::cout << "probe t=" << rounds[ri] << ": conditioning events "
                  << probe.conditioning_events << "/" << trials << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "private one-shot wagering mechanisms and noisy cost-function "
        "market experiments"};
    app.require_subcommand(1);

    Common common;
    double epsilon = 1.0, delta = 0.05;
    double b = 100.0, a = 0.0, k = 10.0, qstar = 0.0;
    double gamma = 2.5;  // k/4 with the default trade bound
    double fee = 0.0, min_unit = 0.0;
    double noise_scale = 2.5;
    std::string noise_kind = "fresh";

    const auto add_market_options = [&](CLI::App* cmd) {
        cmd->add_option("--b", b, "liquidity")->capture_default_str();
        cmd->add_option("--a", a, "cost shift")->capture_default_str();
        cmd->add_option("--k", k, "trade size bound")->capture_default_str();
        cmd->add_option("--qstar", qstar, "adversary target state")
            ->capture_default_str();
        cmd->add_option("--noise", noise_kind, "none|fresh|tree")
            ->capture_default_str();
        cmd->add_option("--noise-scale", noise_scale, "fresh-noise spread")
            ->capture_default_str();
        cmd->add_option("--epsilon", epsilon, "tree-noise per-level budget")
            ->capture_default_str();
    };

    int demo_n = 8;
    CLI::App* demo = app.add_subcommand(
        "wager-demo", "one-shot wagering payouts: exact, expected, realized");
    add_common(demo, common);
    demo->add_option("--n", demo_n, "number of bettors")->capture_default_str();
    demo->add_option("--epsilon", epsilon, "privacy parameter")
        ->capture_default_str();

    int audit_n = 4, audit_trials = 200;
    CLI::App* audit = app.add_subcommand(
        "dp-audit", "exhaustive joint-privacy certification sweep");
    add_common(audit, common);
    audit->add_option("--n", audit_n, "number of bettors (<= enumeration cap)")
        ->capture_default_str();
    audit->add_option("--epsilon", epsilon, "privacy parameter")
        ->capture_default_str();
    audit->add_option("--trials", audit_trials, "fuzz cases")
        ->capture_default_str();

    std::vector<int> conc_ns{10, 100, 1000};
    int conc_trials = 10000;
    CLI::App* conc = app.add_subcommand(
        "concentration", "profit deviation rates against the tail bound");
    add_common(conc, common);
    conc->add_option("--n", conc_ns, "bettor counts (repeatable)")->expected(-1);
    conc->add_option("--epsilon", epsilon, "privacy parameter")
        ->capture_default_str();
    conc->add_option("--delta", delta, "failure probability")
        ->capture_default_str();
    conc->add_option("--trials", conc_trials, "Monte Carlo trials per n")
        ->capture_default_str();

    std::vector<std::size_t> curve_rounds{256, 1024, 4096, 8192};
    int curve_trials = 200;
    CLI::App* curve = app.add_subcommand(
        "loss-curve", "maker loss under the target adversary across horizons");
    add_common(curve, common);
    curve->add_option("--rounds", curve_rounds,
                      "trade horizons T (repeatable)")
        ->expected(-1);
    curve->add_option("--trials", curve_trials, "traces per horizon")
        ->capture_default_str();
    curve->add_option("--gamma", gamma, "displacement radius")
        ->capture_default_str();
    curve->add_option("--fee", fee, "per-trade transaction fee")
        ->capture_default_str();
    curve->add_option("--min-unit", min_unit, "minimum purchase unit")
        ->capture_default_str();
    add_market_options(curve);

    std::vector<std::size_t> probe_rounds{64, 256, 1024};
    int probe_trials = 10000;
    CLI::App* probe = app.add_subcommand(
        "privacy-probe", "empirical privacy floor at chosen probe rounds");
    add_common(probe, common);
    probe->add_option("--rounds", probe_rounds, "probe rounds (repeatable)")
        ->expected(-1);
    probe->add_option("--trials", probe_trials, "trials per probe round")
        ->capture_default_str();
    add_market_options(probe);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (demo->parsed()) return run_wager_demo(common, demo_n, epsilon);
        if (audit->parsed())
            return run_dp_audit(common, audit_n, epsilon, audit_trials);
        if (conc->parsed())
            return run_concentration(common, conc_ns, epsilon, delta,
                                     conc_trials);
        if (curve->parsed())
            return run_loss_curve(common, curve_rounds, curve_trials, b, a, k,
                                  qstar, gamma, noise_kind, noise_scale,
                                  epsilon, fee, min_unit);
        if (probe->parsed())
            return run_privacy_probe(common, probe_rounds, probe_trials, b, a,
                                     k, qstar, noise_kind, noise_scale,
                                     epsilon);
    } catch (const std::domain_error& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
