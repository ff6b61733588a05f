#include "dirac/report.hpp"

#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

using namespace dirac;

namespace {

ExperimentConfig small(const std::string& phi, const std::string& gaps)
{
    auto cfg = ExperimentConfig::defaults();
    cfg.phi_spec = phi;
    cfg.gaps = gaps;
    cfg.average_x = {100.0, 300.0, 1000.0};
    cfg.sigma_x = {10.0, 100.0};
    cfg.zeros_x = 20.0;
    cfg.zeros_bins = 4;
    return cfg;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const CheckRow* find_check(const RegularityReport& r, const std::string& name)
{
    for (const auto& c : r.checks)
        if (c.name == name) return &c;
    return nullptr;
}

} // namespace

TEST_CASE("text forms")
{
    CHECK(parse_phi("zero").family() == Family::zero);
    CHECK(parse_phi("constant:(0.6,0.8)").constant_value() == cplx(0.6, 0.8));
    CHECK(parse_phi("constant:1").constant_value() == cplx(1.0, 0.0));
    CHECK(parse_phi("chirp:2").alpha() == 2.0);
    CHECK(parse_phi("gated_chirp:2,3").q() == 3.0);
    CHECK(parse_phi("periodic:0.7:0.5 (0,-1)").period() == doctest::Approx(0.7));
    CHECK(parse_phi("grid:0.25:1 2 (3, 4)").values().size() == 3);
    for (const char* bad : {"", "chirp", "chirp:0.5", "constant:x", "gated:2", "grid:0:1", "file:/no/such", "zero:1"})
        CHECK_THROWS_AS(parse_phi(bad), ConfigError);

    CHECK(parse_complex_list("(2,1) ( 0 , 3 ) 1.5") == std::vector<cplx>{{2.0, 1.0}, {0.0, 3.0}, {1.5, 0.0}});
    CHECK(parse_real_list("1, 0.5 0.25") == std::vector<double>{1.0, 0.5, 0.25});
    CHECK(parse_interval("(-3.2,3.2)") == std::pair<double, double>{-3.2, 3.2});
    CHECK_THROWS_AS(parse_interval("(1,1)"), ConfigError);
    CHECK_THROWS_AS(parse_real_list("1 two"), ConfigError);
    CHECK(rectangle_grid({-1.0, 1.0, 3.0}, {1.0, 1.0, 1.0}).size() == 3);

    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("config parsing")
{
    std::istringstream ok(R"(
; comment
[phi]
spec = constant:1
[model]
gaps = constant-auto
[grid]
z_re = -1 1 3
z_im = 1 2 2
x = 50 100
[averages]
eps = 1 0.5
[output]
dir = somewhere
)");
    const auto cfg = parse_config(ok);
    CHECK(cfg.z_grid.size() == 6);
    CHECK(cfg.checkpoints == std::vector<double>{50.0, 100.0});
    CHECK(cfg.eps == std::vector<double>{1.0, 0.5});
    CHECK(cfg.output_dir == "somewhere");
    std::string prov;
    const auto g = resolve_gaps(cfg, parse_phi(cfg.phi_spec), &prov);
    REQUIRE(g.gaps.size() == 1);
    CHECK(g.gaps[0] == std::pair<double, double>{-1.0, 1.0});
    CHECK(prov.find("constant-auto") != std::string::npos);

    CHECK(ExperimentConfig::defaults().z_grid.size() == 42);
    for (const char* bad : {"[phi]\nspce = zero\n", "[nosuch]\na = 1\n", "[phi]\nspec = chirp:2\n[model]\ngaps = constant-auto\n",
                            "[grid]\nz = (1,0)\n", "[grid]\nx = 100 50\n", "[averages]\neps = 0.5 1\n",
                            "[grid]\nz = (0,1)\nz_re = 0 1 2\n", "[tolerances]\ngrowth = -1\n", "[model]\ngaps = (1,0)\n",
                            "[sigma]\nbins = 8\n", "not ini ["})
    {
        std::istringstream in(bad);
        CHECK_THROWS_AS(parse_config(in), ConfigError);
    }
    CHECK_THROWS_AS(load_config("/no/such/file.ini"), ConfigError);
}

TEST_CASE("report: free operator")
{
    auto cfg = small("zero", "free");
    const auto r = run_report(cfg);
    CHECK(r.verdict == "REGULAR-CONSISTENT");
    CHECK(r.model.bE == 0.0);
    CHECK(r.checkpoints.back().x == 200.0);
    CHECK(r.checkpoints.back().max_abs_diff <= 0.05);
    long total = 0;
    for (long c : r.zeros.counts) total += c;
    // zeros of sin(20 z) in (-3.2, 3.2]: |k| <= 20
    CHECK(total == 41);
    REQUIRE(r.martin_bins.has_value());
    for (const auto& c : r.checks) CHECK(c.pass);
    for (const auto& c : r.checks) CHECK_FALSE(c.window.axis.empty());

    // byte-identical outputs for an identical config
    const auto base = std::filesystem::temp_directory_path() / "dirac_report_test";
    std::filesystem::remove_all(base);
    write_report(r, base / "a");
    write_report(run_report(cfg), base / "b");
    for (const char* f : {"report.json", "growth.csv", "sigma.csv", "averages.csv", "series.csv", "martin.json", "zeros.csv"}) {
        const auto a = slurp(base / "a" / f);
        CHECK(!a.empty());
        CHECK(a == slurp(base / "b" / f));
    }
    std::filesystem::remove_all(base);
}

TEST_CASE("report: constant data with the automatic gap")
{
    auto cfg = small("constant:1", "constant-auto");
    cfg.zeros_window = {-0.8, 0.8};
    const auto r = run_report(cfg);
    CHECK(std::abs(r.model.bE - 1.0) < 1e-4);
    for (const auto& c : r.cesaro)
        if (c.x == 200.0) CHECK(std::abs(c.value - r.model.bE) <= 0.02);
    CHECK(r.checkpoints.back().max_abs_diff <= 0.05);
    CHECK(r.verdict == "REGULAR-CONSISTENT");
    CHECK(r.zeros.histogram.total_mass <= 3.0 / cfg.zeros_x);
    CHECK_FALSE(r.martin_bins.has_value()); // window meets the band edges
}

TEST_CASE("report: wrong model is inconclusive, never negative")
{
    // chirp with an invented gap: bE = 0.25 above every local average
    auto cfg = small("chirp:2", "(-0.5,0.5)");
    cfg.checkpoints = {50.0};
    const auto r = run_report(cfg);
    CHECK(std::abs(r.model.bE - 0.25) < 1e-4);
    CHECK(r.verdict == "INCONCLUSIVE");
    const auto* ineq = find_check(r, "bE <= sup_eps liminf local average");
    REQUIRE(ineq != nullptr);
    CHECK_FALSE(ineq->pass);
    CHECK(r.averages.verdict == Verdict::inequality_violated);
    // the Cesaro average stays near 1/2 while local averages decay
    CHECK(std::abs(r.cesaro_liminf - 0.5) < 0.05);
}
