#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "marc/config.hpp"
#include "marc/figures.hpp"
#include "marc/sha256.hpp"
#include "marc/stats.hpp"
#include "marc/sweep.hpp"

namespace {

using namespace marc;

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(ConfigParse, FullFileAndDefaults) {
    const std::string text = R"(# sweep description
scheme = marc            # two-user relayed scheme
coded = true
snr_grid_db = 0, 2, 4.5
max_frames = 100000
target_bit_errors = 300
k = 64
code = 5,7,7
urc_offset_db = 3
genie_sic = false
seed = 42
workers = 2
)";
    const SweepConfig cfg = parse_sweep_config(text);
    EXPECT_EQ(cfg.scheme, Scheme::Marc);
    EXPECT_TRUE(cfg.coded);
    ASSERT_EQ(cfg.snr_grid_db.size(), 3u);
    EXPECT_DOUBLE_EQ(cfg.snr_grid_db[2], 4.5);
    EXPECT_EQ(cfg.max_frames, 100000u);
    EXPECT_EQ(cfg.target_bit_errors, 300u);
    EXPECT_EQ(cfg.k, 64);
    EXPECT_FALSE(cfg.urc_ideal);
    EXPECT_DOUBLE_EQ(cfg.urc_offset_db, 3.0);
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.workers, 2);

    const SweepConfig min = parse_sweep_config("scheme = direct\nsnr_grid_db = 10\n");
    EXPECT_EQ(min.max_frames, 10000000u);
    EXPECT_EQ(min.target_bit_errors, 200u);
    EXPECT_EQ(min.k, 50);
    EXPECT_TRUE(min.urc_ideal);
    EXPECT_EQ(min.seed, 12345u);
    EXPECT_EQ(min.workers, 1);
}

TEST(ConfigParse, RejectsMalformedInput) {
    const std::string base = "scheme = marc\nsnr_grid_db = 0\n";
    try {
        parse_sweep_config(base + "snr_step = 2\n");
        FAIL() << "unknown key accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field, "snr_step");
    }
    EXPECT_THROW(parse_sweep_config(base + "seed = 1\nseed = 2\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config("snr_grid_db = 0\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config("scheme = marc\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "coded = maybe\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "urc_offset_db = 3dB\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "code = 5,9\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config("scheme = relay\nsnr_grid_db = 0\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config("scheme = marc\nsnr_grid_db = 0,,4\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "just a line\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "workers = 0\n"), ConfigError);
    EXPECT_THROW(parse_sweep_config(base + "max_frames = 0\n"), ConfigError);
}

TEST(ConfigParse, OctalGeneratorsFixConstraintLength) {
    const SweepConfig k7 =
        parse_sweep_config("scheme = marc\nsnr_grid_db = 0\ncoded = true\ncode = 133,171\n");
    ASSERT_EQ(k7.code_generators.size(), 2u);
    EXPECT_EQ(k7.code_generators[0], 0133u);
    EXPECT_EQ(k7.code_generators[1], 0171u);
    EXPECT_EQ(k7.constraint_length, 7);

    const SweepConfig k3 =
        parse_sweep_config("scheme = marc\nsnr_grid_db = 0\ncoded = true\ncode = 5,7,7\n");
    EXPECT_EQ(k3.constraint_length, 3);
}

TEST(ConfigParse, SchemeConstraintsAreEnforced) {
    try {
        parse_sweep_config("scheme = marc3\nsnr_grid_db = 0\ncoded = true\n");
        FAIL() << "marc3 coded accepted";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field, "coded");
    }
    EXPECT_THROW(parse_sweep_config("scheme = marc\nsnr_grid_db = 0\nurc_offset_db = 3\n"),
                 ConfigError);
    EXPECT_NO_THROW(
        parse_sweep_config("scheme = marc\nsnr_grid_db = 0\nurc_offset_db = ideal\n"));
    EXPECT_NO_THROW(parse_sweep_config("scheme = marc3\nsnr_grid_db = 0\n"));
}

TEST(WilsonInterval, MatchesReferenceValues) {
    const auto a = stats::wilson(7, 1000);
    EXPECT_NEAR(a.low, 0.0033948684009907646, 1e-15);
    EXPECT_NEAR(a.high, 0.014378315465766588, 1e-15);
    const auto b = stats::wilson(0, 500);
    EXPECT_NEAR(b.low, 0.0, 1e-15);
    EXPECT_NEAR(b.high, 0.007624340461552241, 1e-15);
    const auto c = stats::wilson(200, 5000);
    EXPECT_NEAR(c.low, 0.034912144402327185, 1e-15);
    EXPECT_NEAR(c.high, 0.04579414138712538, 1e-15);
    const auto d = stats::wilson(500, 500);
    EXPECT_NEAR(d.low, 0.9923756595384479, 1e-12);
    EXPECT_DOUBLE_EQ(d.high, 1.0);
    const auto e = stats::wilson(1, 3);
    EXPECT_NEAR(e.low, 0.06149194472039621, 1e-15);
    EXPECT_NEAR(e.high, 0.7923403991979522, 1e-15);
    const auto z = stats::wilson(0, 0);
    EXPECT_DOUBLE_EQ(z.low, 0.0);
    EXPECT_DOUBLE_EQ(z.high, 1.0);
}

TEST(Digest, MatchesKnownVectors) {
    EXPECT_EQ(hash::sha256_hex(""),
              "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    EXPECT_EQ(hash::sha256_hex("abc"),
              "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(hash::sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"),
              "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(CsvFormat, HeadersArePinned) {
    EXPECT_EQ(ber_csv_header(),
              "scheme,snr_db,ebn0_db,frames,bits,bit_errors,ber,ci_low,ci_high,p0,p1,p2,p3");
    EXPECT_EQ(bound_csv_header(), "scheme,snr_db,ebn0_db,bound,p0,p1,p2,p3");
}

TEST(CsvFormat, RowsCarryThirteenFields) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Direct;
    cfg.snr_grid_db = {6.0};
    cfg.max_frames = 500;
    cfg.target_bit_errors = 10;
    cfg.k = 10;
    const std::string csv = to_csv(run_sweep(cfg));
    std::stringstream ss(csv);
    std::string line;
    ASSERT_TRUE(std::getline(ss, line));
    EXPECT_EQ(line, ber_csv_header());
    ASSERT_TRUE(std::getline(ss, line));
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12);
    EXPECT_EQ(line.rfind("direct,6,", 0), 0u);
}

TEST(SweepDeterminism, RerunIsByteIdentical) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Marc;
    cfg.snr_grid_db = {4.0};
    cfg.max_frames = 2000;
    cfg.target_bit_errors = 100;
    cfg.seed = 9001;
    const std::string first = to_csv(run_sweep(cfg));
    const std::string second = to_csv(run_sweep(cfg));
    EXPECT_EQ(first, second);
}

TEST(SweepDeterminism, WorkerCountDoesNotChangeOutput) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Marc;
    cfg.snr_grid_db = {4.0, 8.0};
    cfg.max_frames = 4000;
    cfg.target_bit_errors = 200;
    cfg.seed = 9002;
    cfg.workers = 1;
    const std::string serial = to_csv(run_sweep(cfg));
    cfg.workers = 4;
    const std::string parallel = to_csv(run_sweep(cfg));
    EXPECT_EQ(serial, parallel);
}

TEST(SweepStopRule, EveryPointMeetsTargetOrExhaustsBudget) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Direct;
    cfg.snr_grid_db = {0.0, 10.0, 35.0};
    cfg.max_frames = 3000;
    cfg.target_bit_errors = 150;
    cfg.seed = 9003;
    const auto points = run_sweep(cfg);
    ASSERT_EQ(points.size(), 3u);
    for (const auto& pt : points) {
        EXPECT_TRUE(pt.bit_errors >= cfg.target_bit_errors || pt.frames == cfg.max_frames)
            << "snr " << pt.snr_db << ": " << pt.bit_errors << " errors after " << pt.frames
            << " frames";
        EXPECT_EQ(pt.bits, pt.frames * static_cast<std::uint64_t>(cfg.k));
        EXPECT_LE(pt.ci_low, pt.ber);
        EXPECT_GE(pt.ci_high, pt.ber);
    }
    EXPECT_EQ(points.back().frames, cfg.max_frames);
}

TEST(SweepEnergyAxis, MatchesOverheadAccounting) {
    SweepConfig direct;
    direct.scheme = Scheme::Direct;
    direct.coded = true;
    direct.snr_grid_db = {8.0};
    direct.max_frames = 250;
    direct.target_bit_errors = 1;
    const auto dp = run_sweep(direct);
    EXPECT_NEAR(dp[0].ebn0_db, 8.0 + 6.106601630898799, 1e-12);

    SweepConfig alam;
    alam.scheme = Scheme::Alamouti;
    alam.snr_grid_db = {8.0};
    alam.max_frames = 250;
    alam.target_bit_errors = 1;
    const auto ap = run_sweep(alam);
    EXPECT_NEAR(ap[0].ebn0_db, 8.0, 1e-12);
    EXPECT_EQ(ap[0].state_hist[0], 1.0);

    SweepConfig marc;
    marc.scheme = Scheme::Marc;
    marc.snr_grid_db = {6.0};
    marc.max_frames = 1000;
    marc.target_bit_errors = 50;
    const auto mp = run_sweep(marc);
    EXPECT_EQ(mp[0].state_hist[3], 1.0);
    EXPECT_NEAR(mp[0].ebn0_db, 6.0 + 10.0 * std::log10(2.0), 1e-12);

    SweepConfig coded = marc;
    coded.coded = true;
    coded.max_frames = 250;
    coded.target_bit_errors = 10;
    const auto cp = run_sweep(coded);
    EXPECT_NEAR(cp[0].ebn0_db, 6.0 + 9.116901587538612, 1e-12);
}

TEST(SweepAccuracy, DirectPointMatchesClosedForm) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Direct;
    cfg.snr_grid_db = {10.0};
    cfg.max_frames = 50000;
    cfg.target_bit_errors = 2000;
    cfg.seed = 9004;
    const auto pt = run_sweep(cfg)[0];
    ASSERT_GE(pt.bit_errors, cfg.target_bit_errors);
    const double want = 0.023268705377203824;
    EXPECT_NEAR(pt.ber, want, 0.10 * want);
}

TEST(SweepAccuracy, UsersAreStatisticallySymmetric) {
    FrameConfig fc;
    fc.p = 1.0;
    fc.n0 = std::pow(10.0, -0.6);
    fc.k = 50;
    fc.seed = 777;
    std::uint64_t err_a = 0, err_b = 0;
    for (std::uint64_t f = 0; f < 30000; ++f) {
        const auto r = detail::marc_trial(fc, nullptr, false, f);
        err_a += r.errors_a;
        err_b += r.errors_b;
    }
    ASSERT_GT(err_a + err_b, 5000u);
    const double a = static_cast<double>(err_a);
    const double b = static_cast<double>(err_b);
    EXPECT_LT(std::abs(a - b), 0.08 * (a + b) / 2.0);
}

TEST(SweepSchemes, ThreeUserModeProducesConsistentPoint) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Marc3;
    cfg.snr_grid_db = {8.0};
    cfg.max_frames = 500;
    cfg.target_bit_errors = 50;
    const auto pt = run_sweep(cfg)[0];
    EXPECT_EQ(pt.scheme, "marc3");
    EXPECT_EQ(pt.bits, pt.frames * 150u);
    double sum = 0.0;
    for (double h : pt.state_hist) sum += h;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_EQ(pt.state_hist[3], 1.0);
    EXPECT_NEAR(pt.ebn0_db, 8.0 + 10.0 * std::log10((3.0 + 3.0) / 3.0), 1e-12);
    EXPECT_GT(pt.ber, 0.0);
}

TEST(BoundRunner, IdealPredictionMatchesDirectComposition) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Marc;
    cfg.snr_grid_db = {0.0, 8.0, 16.0};
    const auto pts = run_bound(cfg);
    ASSERT_EQ(pts.size(), 3u);
    double prev = 1.0;
    for (const auto& bp : pts) {
        EXPECT_EQ(bp.scheme, "marc-bound");
        EXPECT_DOUBLE_EQ(bp.probs.p3, 1.0);
        BoundInputs in;
        in.snr0 = std::pow(10.0, bp.snr_db / 10.0);
        in.probs = bp.probs;
        EXPECT_DOUBLE_EQ(bp.bound, bep_upper_bound(in));
        EXPECT_NEAR(bp.ebn0_db, bp.snr_db + 10.0 * std::log10(2.0), 1e-12);
        EXPECT_LT(bp.bound, prev);
        prev = bp.bound;
    }
}

TEST(BoundRunner, CodedCurveAppliesFreeDistanceScaling) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Marc;
    cfg.coded = true;
    cfg.snr_grid_db = {8.0};
    const auto bp = run_bound(cfg)[0];
    BoundInputs in;
    in.snr0 = std::pow(10.0, 0.8);
    in.probs = state_probs(0.0, 0.0);
    in.coded = CodedParams{1.0 / 3.0, 8, 2, 50};
    EXPECT_DOUBLE_EQ(bp.bound, coded_ber_upper_bound(in));
}

TEST(BoundRunner, RejectsBaselineSchemes) {
    SweepConfig cfg;
    cfg.scheme = Scheme::Direct;
    cfg.snr_grid_db = {8.0};
    try {
        run_bound(cfg);
        FAIL() << "bound accepted a baseline scheme";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field, "scheme");
    }
}

TEST(BoundRunner, CalibratedFailureRatesTrackUplinkQuality) {
    const ConvCode code = make_conv_code({5, 7, 7}, 3);
    const double snr0 = std::pow(10.0, 0.2);
    const double weak = calibrate_urc_failure(snr0, 1.0, code, 50, 5, 1, 4, 4000);
    const double strong = calibrate_urc_failure(snr0, 4.0, code, 50, 5, 1, 4, 4000);
    EXPECT_GT(weak, strong);
    EXPECT_GT(strong, 0.0);
    EXPECT_LT(weak, 1.0);

    SweepConfig ideal;
    ideal.scheme = Scheme::Marc;
    ideal.coded = true;
    ideal.snr_grid_db = {8.0};
    SweepConfig degraded = ideal;
    degraded.urc_ideal = false;
    degraded.urc_offset_db = 0.0;
    const auto bi = run_bound(ideal)[0];
    const auto bd = run_bound(degraded)[0];
    EXPECT_NEAR(bd.probs.p0 + bd.probs.p1 + bd.probs.p2 + bd.probs.p3, 1.0, 1e-12);
    EXPECT_LT(bd.probs.p3, 1.0);
    EXPECT_GT(bd.bound, bi.bound);
}

TEST(FigurePresets, CurveSetsMatchPublishedLayout) {
    const auto f3 = figure_spec("fig3");
    std::vector<std::string> names;
    for (const auto& c : f3.curves) {
        names.push_back(c.name);
        EXPECT_NO_THROW(c.config.validate());
    }
    EXPECT_EQ(names, (std::vector<std::string>{"marc-uncoded-sim", "marc-uncoded-bound",
                                               "direct-uncoded", "alamouti-uncoded"}));
    EXPECT_TRUE(f3.curves[1].is_bound);

    const auto f5 = figure_spec("fig5");
    int bounds = 0, sims = 0;
    bool has_offset3 = false;
    for (const auto& c : f5.curves) {
        (c.is_bound ? bounds : sims) += 1;
        if (c.name.find("urc+3db") != std::string::npos) has_offset3 = true;
        EXPECT_NO_THROW(c.config.validate());
    }
    EXPECT_EQ(bounds, 3);
    EXPECT_EQ(sims, 3);
    EXPECT_TRUE(has_offset3);

    const auto f7 = figure_spec("fig7");
    bool has_marc3 = false;
    for (const auto& c : f7.curves)
        if (c.name == "marc3-uncoded-sim") has_marc3 = true;
    EXPECT_TRUE(has_marc3);

    EXPECT_NO_THROW(figure_spec("fig4"));
    EXPECT_NO_THROW(figure_spec("fig6"));
    EXPECT_THROW(figure_spec("fig9"), ConfigError);
}

TEST(FigurePresets, WriteFigureEmitsHashedArtifacts) {
    FigureSpec spec;
    spec.name = "tiny";
    SweepConfig sim;
    sim.scheme = Scheme::Direct;
    sim.snr_grid_db = {4.0};
    sim.max_frames = 1000;
    sim.target_bit_errors = 50;
    sim.k = 20;
    SweepConfig bound;
    bound.scheme = Scheme::Marc;
    bound.snr_grid_db = {0.0, 8.0};
    spec.curves = {{"tiny-sim", sim, false}, {"tiny-bound", bound, true}};

    const auto dir = std::filesystem::temp_directory_path() / "marcsim-figure-test";
    std::filesystem::remove_all(dir);
    const auto artifacts = write_figure(spec, dir);
    ASSERT_EQ(artifacts.size(), 2u);

    const std::string manifest = read_file(dir / "manifest.txt");
    EXPECT_NE(manifest.find("figure = tiny"), std::string::npos);
    for (const auto& art : artifacts) {
        const std::string body = read_file(dir / art.filename);
        ASSERT_FALSE(body.empty());
        EXPECT_EQ(hash::sha256_hex(body), art.sha256);
        EXPECT_NE(manifest.find("sha256 = " + art.sha256), std::string::npos);
    }
    EXPECT_EQ(read_file(dir / "tiny-sim.csv").rfind(ber_csv_header(), 0), 0u);
    EXPECT_EQ(read_file(dir / "tiny-bound.csv").rfind(bound_csv_header(), 0), 0u);
    std::filesystem::remove_all(dir);
}

}  // namespace
