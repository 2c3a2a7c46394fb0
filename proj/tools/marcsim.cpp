#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "marc/analytic_bounds.hpp"
#include "marc/coding.hpp"
#include "marc/config.hpp"
#include "marc/figures.hpp"
#include "marc/quadrature.hpp"
#include "marc/rng.hpp"
#include "marc/semianalytic.hpp"
#include "marc/stats.hpp"
#include "marc/sweep.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw marc::ConfigError("config", "cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << content;
}

struct CheckTable {
    bool all_ok = true;
    void report(const std::string& name, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS  " : "FAIL  ") << name;
        if (!ok && !detail.empty()) std::cout << "  (" << detail << ")";
        std::cout << "\n";
        if (!ok) all_ok = false;
    }
};

int run_validate() {
    using namespace marc;
    CheckTable table;

    {
        const auto out = rng::philox4x32({0, 0, 0, 0}, {0, 0});
        const std::array<std::uint32_t, 4> want{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u};
        table.report("counter-rng-known-answer", out == want);
    }
    {
        const auto [d_free, b_dfree] = compute_distance_spectrum({5, 7, 7}, 3);
        table.report("code-distance-spectrum", d_free == 8 && b_dfree == 2,
                      "got d_free=" + std::to_string(d_free));
    }
    {
        bool ok = true;
        BitVec block(66, 0);
        block[3] = 1;
        block[40] = 1;
        BitVec coded = crc_append(block);
        for (std::size_t i = 0; i < coded.size() && ok; ++i) {
            BitVec corrupted = coded;
            corrupted[i] ^= 1;
            ok = !crc_check(corrupted);
        }
        table.report("crc-detects-single-errors", ok && crc_check(coded));
    }
    {
        const std::uint64_t n = 1000000;
        std::uint64_t below = 0;
        for (std::uint64_t i = 0; i < n; ++i) {
            rng::Stream st(5, i, 0);
            const double u = -std::log(st.uniform());
            const double v = -std::log(st.uniform());
            if (u * v / (u + v) < 0.5) ++below;
        }
        const double est = static_cast<double>(below) / static_cast<double>(n);
        const double want = parallel_exp_cdf(0.5, 1.0);
        const double sigma = std::sqrt(want * (1.0 - want) / static_cast<double>(n));
        table.report("parallel-gain-cdf-vs-mc", std::abs(est - want) < 4.0 * sigma,
                      "est=" + format_double(est) + " want=" + format_double(want));
    }
    {
        bool ok = true;
        for (auto [s, lam] : std::vector<std::pair<double, double>>{{1, 1}, {10, 1}, {100, 2}}) {
            const double upper = 60.0 / (s + 4.0 * lam) + 30.0 / (4.0 * lam);
            const double quadv = quad::tanh_sinh(
                [&, lam_ = lam, s_ = s](double z) {
                    return std::exp(-s_ * z) * parallel_exp_pdf(z, lam_);
                },
                0.0, upper);
            const double closed = laplace_parallel_exp(s, lam);
            if (std::abs(closed - quadv) / closed > 1e-6) ok = false;
        }
        table.report("transform-vs-quadrature", ok);
    }
    {
        BoundInputs in;
        in.snr0 = std::pow(10.0, 0.8);
        in.probs = StateProbs{0.0, 0.0, 0.0, 1.0};
        const double v = bep_upper_bound(in);
        table.report("bound-reference-value", std::abs(v - 0.014773398773679506) / v < 1e-9);
    }
    {
        SweepConfig cfg;
        cfg.scheme = Scheme::Direct;
        cfg.snr_grid_db = {10.0};
        cfg.max_frames = 60000;
        cfg.target_bit_errors = 5000;
        cfg.seed = 2024;
        const auto pts = run_sweep(cfg);
        const double want = 0.023268705377203824;
        // Bits within a frame share one fading draw, so the binomial interval
        // understates the sampling error; allow a few widths of slack.
        const double slack = 4.0 * (pts[0].ci_high - pts[0].ci_low);
        const bool ok = std::abs(pts[0].ber - want) < slack && pts[0].bit_errors >= 5000;
        table.report("direct-sim-vs-closed-form", ok, "ber=" + format_double(pts[0].ber));
    }
    {
        bool ok = true;
        for (double db : {8.0, 24.0}) {
            BoundInputs in;
            in.snr0 = std::pow(10.0, db / 10.0);
            in.probs = StateProbs{0.0, 0.0, 0.0, 1.0};
            const auto est = semianalytic_bep_is(in.snr0, 1.0, in.probs, 200000, 7);
            if (bep_upper_bound(in) < est.bep) ok = false;
        }
        table.report("bound-dominates-semianalytic", ok);
    }
    {
        const auto ci = stats::wilson(7, 1000);
        const bool ok = std::abs(ci.low - 0.0033948684009907646) < 1e-12 &&
                        std::abs(ci.high - 0.014378315465766588) < 1e-12;
        table.report("wilson-interval-reference", ok);
    }
    {
        SweepConfig cfg;
        cfg.scheme = Scheme::Marc;
        cfg.snr_grid_db = {4.0, 8.0};
        cfg.max_frames = 4000;
        cfg.target_bit_errors = 100000;
        cfg.seed = 99;
        const std::string a = to_csv(run_sweep(cfg));
        cfg.workers = 4;
        const std::string b = to_csv(run_sweep(cfg));
        table.report("sweep-worker-determinism", a == b);
    }

    std::cout << (table.all_ok ? "all checks passed\n" : "validation failed\n");
    return table.all_ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator and analytic bounds for a two-user relay channel"};
    app.require_subcommand(1);

    std::string sweep_config, sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a BER sweep from a config file");
    sweep_cmd->add_option("--config", sweep_config, "flat key=value config file")->required();
    sweep_cmd->add_option("--out", sweep_out, "output CSV path (default stdout)");

    std::string bound_config, bound_out;
    auto* bound_cmd = app.add_subcommand("bound", "evaluate the analytic bound on a grid");
    bound_cmd->add_option("--config", bound_config, "flat key=value config file")->required();
    bound_cmd->add_option("--out", bound_out, "output CSV path (default stdout)");

    std::string figure_name, figure_out;
    auto* figure_cmd = app.add_subcommand("figure", "reproduce a preset figure's curve set");
    figure_cmd->add_option("name", figure_name, "fig3|fig4|fig5|fig6|fig7")->required();
    figure_cmd->add_option("--out", figure_out, "output directory")->required();

    auto* validate_cmd = app.add_subcommand("validate", "run the built-in oracle checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (sweep_cmd->parsed()) {
            const auto cfg = marc::parse_sweep_config(read_file(sweep_config));
            write_output(sweep_out, marc::to_csv(marc::run_sweep(cfg)));
            return 0;
        }
        if (bound_cmd->parsed()) {
            const auto cfg = marc::parse_sweep_config(read_file(bound_config));
            write_output(bound_out, marc::to_csv(marc::run_bound(cfg)));
            return 0;
        }
        if (figure_cmd->parsed()) {
            marc::write_figure(marc::figure_spec(figure_name), figure_out);
            return 0;
        }
        if (validate_cmd->parsed()) {
            return run_validate();
        }
    } catch (const marc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
