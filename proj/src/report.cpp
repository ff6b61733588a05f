#include "dirac/report.hpp"

#include "dirac/parallel.hpp"
#include "dirac/propagation.hpp"
#include "dirac/series.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace dirac {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Run one stage and prefix any library error with its name, keeping the type.
template <class F>
auto stage(const std::string& name, F&& f) -> decltype(f())
{
    auto tag = [&](const std::exception& e) { return name + ": " + e.what(); };
    try {
        return f();
    } catch (const ResolutionError& e) {
        throw ResolutionError(tag(e));
    } catch (const InstabilityError& e) {
        throw InstabilityError(tag(e));
    } catch (const ModelError& e) {
        throw ModelError(tag(e));
    } catch (const NumericalError& e) {
        throw NumericalError(tag(e));
    } catch (const DomainError& e) {
        throw DomainError(tag(e));
    } catch (const ConfigError& e) {
        throw ConfigError(tag(e));
    } catch (const InvalidDataError& e) {
        throw InvalidDataError(tag(e));
    }
}

Json number(double v)
{
    if (std::isfinite(v)) return v;
    return format_double(v);
}

Json window_json(const Window& w)
{
    return Json{{"axis", w.axis}, {"lo", number(w.lo)}, {"hi", number(w.hi)}};
}

class Csv {
public:
    explicit Csv(std::initializer_list<const char*> header)
    {
        bool first = true;
        for (const char* h : header) {
            out_ << (first ? "" : ",") << h;
            first = false;
        }
        out_ << '\n';
    }
    Csv& operator<<(double v)
    {
        sep();
        out_ << format_double(v);
        return *this;
    }
    Csv& operator<<(const std::optional<double>& v)
    {
        sep();
        if (v) out_ << format_double(*v);
        return *this;
    }
    Csv& operator<<(long v)
    {
        sep();
        out_ << v;
        return *this;
    }
    Csv& operator<<(const std::string& s)
    {
        sep();
        out_ << s;
        return *this;
    }
    void end()
    {
        out_ << '\n';
        fresh_ = true;
    }
    std::string str() const { return out_.str(); }

private:
    void sep()
    {
        if (!fresh_) out_ << ',';
        fresh_ = false;
    }
    std::ostringstream out_;
    bool fresh_ = true;
};

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("failed writing " + path.string());
}

Json model_json(const MartinModel& m)
{
    Json gaps = Json::array();
    for (const auto& [a, b] : m.gapset.gaps) gaps.push_back(Json::array({a, b}));
    Json cs = Json::array();
    for (double c : m.critical_points) cs.push_back(c);
    return Json{{"gaps", gaps},
                {"critical_points", cs},
                {"bE", m.bE},
                {"normalization", m.normalization},
                {"gap_residual", m.gap_residual}};
}

} // namespace

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

RegularityReport run_report(const ExperimentConfig& cfg)
{
    validate(cfg);
    RegularityReport rep;
    const auto phi = parse_phi(cfg.phi_spec);
    rep.phi = phi.describe();

    rep.model = stage("martin", [&] { return martin_build(resolve_gaps(cfg, phi, &rep.provenance)); });
    const double bE = rep.model.bE;
    const double tol = cfg.tol_average * std::max(1.0, bE);

    // Cesaro averages on checkpoints and the averaging grid; proxies on the largest decade.
    stage("cesaro", [&] {
        std::vector<double> xs = cfg.checkpoints;
        xs.insert(xs.end(), cfg.average_x.begin(), cfg.average_x.end());
        std::sort(xs.begin(), xs.end());
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        rep.cesaro.resize(xs.size());
        for_each_index(xs.size(), Exec::parallel, [&](std::size_t k) { rep.cesaro[k] = {xs[k], cesaro_l2(phi, xs[k])}; });
        const double hi = cfg.average_x.back();
        rep.cesaro_window = {"x", hi / 10.0, hi};
        rep.cesaro_liminf = kInfinity;
        rep.cesaro_limsup = -kInfinity;
        for (const auto& r : rep.cesaro) {
            if (r.x < rep.cesaro_window.lo) continue;
            rep.cesaro_liminf = std::min(rep.cesaro_liminf, r.value);
            rep.cesaro_limsup = std::max(rep.cesaro_limsup, r.value);
        }
    });

    rep.averages = stage("averages", [&] { return regularity_gap(phi, bE, cfg.average_x, cfg.eps); });

    rep.sigma_x = cfg.sigma_x;
    stage("sigma", [&] {
        for (double x : cfg.sigma_x) rep.sigma.push_back(sigma_summary(phi, x, cfg.sigma_kmax, cfg.sigma_bins));
    });

    stage("growth", [&] {
        const auto field = growth_field(phi, cfg.z_grid, cfg.checkpoints);
        const auto m = martin_table(rep.model, cfg.z_grid);
        for (std::size_t ix = 0; ix < cfg.checkpoints.size(); ++ix) {
            CheckpointRow row{cfg.checkpoints[ix], 0.0, kInfinity};
            for (std::size_t iz = 0; iz < cfg.z_grid.size(); ++iz) {
                const double h = field.at(iz, ix);
                rep.growth.push_back({cfg.checkpoints[ix], cfg.z_grid[iz], h, m[iz]});
                row.max_abs_diff = std::max(row.max_abs_diff, std::abs(h - m[iz]));
                row.min_margin = std::min(row.min_margin, h - m[iz]);
            }
            rep.checkpoints.push_back(row);
        }
    });

    rep.series_x = cfg.series_x;
    stage("series", [&] {
        rep.series.resize(cfg.series_y.size());
        for_each_index(cfg.series_y.size(), Exec::parallel, [&](std::size_t k) {
            const cplx z(0.0, cfg.series_y[k]);
            const auto lit = growth_residual(phi, cfg.series_x, z);
            const auto win = growth_residual_between(phi, 0.5 * cfg.series_x, cfg.series_x, z);
            rep.series[k] = {cfg.series_y[k], lit.residual, lit.modulus_residual, win.residual};
        });
        std::vector<double> r, mr;
        for (const auto& s : rep.series) {
            r.push_back(s.residual);
            mr.push_back(s.modulus_residual);
        }
        rep.series_slope = loglog_slope(cfg.series_y, r);
        rep.modulus_slope = loglog_slope(cfg.series_y, mr);
    });

    rep.zeros_x = cfg.zeros_x;
    stage("zeros", [&] {
        const auto [lo, hi] = cfg.zeros_window;
        rep.zeros = zero_counting_detail(phi, cfg.zeros_x, lo, hi, cfg.zeros_bins);
        try {
            rep.martin_bins = martin_measure(rep.model, lo, hi, cfg.zeros_bins);
        } catch (const DomainError&) {
            rep.martin_bins.reset();
        }
    });

    // Checks. Inequalities hold for every operator; verdict rows decide the verdict.
    auto add = [&](std::string kind, std::string name, Window w, double value, double bound, bool pass) {
        rep.checks.push_back({std::move(kind), std::move(name), std::move(w), value, bound, pass});
    };
    add("inequality", "bE <= liminf cesaro", rep.cesaro_window, rep.cesaro_liminf, bE - tol,
        rep.cesaro_liminf >= bE - tol);
    const Window avg_window{"x", rep.averages.window_lo, rep.averages.window_hi};
    add("inequality", "bE <= sup_eps liminf local average", avg_window, rep.averages.sup_liminf, bE - tol,
        rep.averages.sup_liminf >= bE - tol);
    for (const auto& c : rep.checkpoints)
        add("inequality", "h >= M - margin", {"z-grid at x", c.x, c.x}, c.min_margin, -cfg.tol_margin,
            c.min_margin >= -cfg.tol_margin);

    bool regular = true;
    for (std::size_t k = 0; k < rep.averages.eps.size(); ++k) {
        const double v = rep.averages.limsup_proxy[k];
        const bool ok = v <= bE + tol;
        regular = regular && ok;
        add("verdict", "limsup local average <= bE + tol (eps " + format_double(rep.averages.eps[k]) + ")", avg_window,
            v, bE + tol, ok);
    }
    const auto& last = rep.checkpoints.back();
    const bool close = last.max_abs_diff <= cfg.tol_growth;
    regular = regular && close;
    add("verdict", "max |h - M| at the last checkpoint", {"z-grid at x", last.x, last.x}, last.max_abs_diff,
        cfg.tol_growth, close);

    add("consistency", "gap conditions", {"gaps", 0.0, 0.0}, rep.model.gap_residual, 1e-10,
        rep.model.gap_residual <= 1e-10);
    for (std::size_t k = 0; k < rep.sigma.size(); ++k) {
        const auto& s = rep.sigma[k];
        if (s.route != SigmaRoute::riemann) continue;
        const double rel = s.cesaro > 0.0 ? std::abs(s.band_mass - s.cesaro) / s.cesaro : std::abs(s.band_mass);
        add("consistency", "Plancherel at x = " + format_double(rep.sigma_x[k]), {"k", -kPi / s.step, kPi / s.step},
            rel, 1e-6, rel <= 1e-6);
    }
    // Finite x cannot certify failure of a liminf criterion: no negative verdict.
    rep.verdict = regular ? "REGULAR-CONSISTENT" : "INCONCLUSIVE";
    return rep;
}

std::string martin_json(const MartinModel& model)
{
    return model_json(model).dump(2) + "\n";
}

std::string report_json(const RegularityReport& rep)
{
    Json j;
    j["phi"] = rep.phi;
    j["verdict"] = rep.verdict;
    Json model = model_json(rep.model);
    model["provenance"] = rep.provenance;
    j["model"] = model;

    Json ces = Json::array();
    for (const auto& r : rep.cesaro) ces.push_back(Json{{"x", r.x}, {"value", r.value}, {"gap", r.value - rep.model.bE}});
    j["cesaro"] = Json{{"window", window_json(rep.cesaro_window)},
                       {"liminf_proxy", number(rep.cesaro_liminf)},
                       {"limsup_proxy", number(rep.cesaro_limsup)},
                       {"rows", ces}};

    const auto& a = rep.averages;
    Json proxies = Json::array();
    for (std::size_t k = 0; k < a.eps.size(); ++k)
        proxies.push_back(Json{{"eps", a.eps[k]}, {"liminf_proxy", a.liminf_proxy[k]}, {"limsup_proxy", a.limsup_proxy[k]}});
    j["local_averages"] = Json{{"window", window_json({"x", a.window_lo, a.window_hi})},
                               {"sup_liminf", a.sup_liminf},
                               {"tolerance", a.tolerance},
                               {"inequality_verdict", to_string(a.verdict)},
                               {"proxies", proxies}};

    Json sig = Json::array();
    for (std::size_t k = 0; k < rep.sigma.size(); ++k) {
        const auto& s = rep.sigma[k];
        const double kmax = s.histogram.bin_edges.back();
        Json row{{"x", rep.sigma_x[k]},
                 {"route", to_string(s.route)},
                 {"window", window_json({"k", -kmax, kmax})},
                 {"window_mass", window_mass(s.histogram, kmax)},
                 {"tail_mass", s.histogram.tail_mass},
                 {"total_mass", s.histogram.total_mass},
                 {"cesaro", s.cesaro},
                 {"step", s.step}};
        if (s.route == SigmaRoute::riemann) row["band_mass"] = s.band_mass;
        sig.push_back(row);
    }
    j["sigma"] = sig;

    Json growth = Json::array();
    for (const auto& c : rep.checkpoints)
        growth.push_back(Json{{"x", c.x},
                              {"window", window_json({"z-grid at x", c.x, c.x})},
                              {"max_abs_h_minus_M", number(c.max_abs_diff)},
                              {"min_h_minus_M", number(c.min_margin)}});
    j["growth"] = growth;

    Json series = Json::array();
    for (const auto& s : rep.series)
        series.push_back(Json{{"y", s.y},
                              {"residual", s.residual},
                              {"modulus_residual", s.modulus_residual},
                              {"windowed_residual", s.windowed_residual}});
    j["series"] = Json{{"x", rep.series_x},
                       {"window", window_json({"y", rep.series.front().y, rep.series.back().y})},
                       {"loglog_slope", rep.series_slope},
                       {"modulus_loglog_slope", rep.modulus_slope},
                       {"rows", series}};

    long total = 0;
    for (long c : rep.zeros.counts) total += c;
    Json zeros{{"x", rep.zeros_x},
               {"window", window_json({"z", rep.zeros.histogram.bin_edges.front(), rep.zeros.histogram.bin_edges.back()})},
               {"total_count", total},
               {"total_mass", rep.zeros.histogram.total_mass},
               {"grid_points", rep.zeros.samples}};
    if (rep.martin_bins) zeros["martin_mass"] = rep.martin_bins->total_mass;
    j["zeros"] = zeros;

    Json checks = Json::array();
    for (const auto& c : rep.checks)
        checks.push_back(Json{{"kind", c.kind},
                              {"name", c.name},
                              {"window", window_json(c.window)},
                              {"value", number(c.value)},
                              {"bound", number(c.bound)},
                              {"pass", c.pass}});
    j["checks"] = checks;
    return j.dump(2) + "\n";
}

void write_report(const RegularityReport& rep, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

    write_file(dir / "report.json", report_json(rep));
    write_file(dir / "martin.json", martin_json(rep.model));

    Csv growth{"x", "z_re", "z_im", "h", "martin", "h_minus_martin"};
    for (const auto& g : rep.growth) {
        growth << g.x << g.z.real() << g.z.imag() << g.h << g.martin << g.h - g.martin;
        growth.end();
    }
    write_file(dir / "growth.csv", growth.str());

    Csv sigma{"x", "route", "k_lo", "k_hi", "mass"};
    for (std::size_t k = 0; k < rep.sigma.size(); ++k) {
        const auto& h = rep.sigma[k].histogram;
        for (std::size_t b = 0; b < h.masses.size(); ++b) {
            sigma << rep.sigma_x[k] << to_string(rep.sigma[k].route) << h.bin_edges[b] << h.bin_edges[b + 1]
                  << h.masses[b];
            sigma.end();
        }
    }
    write_file(dir / "sigma.csv", sigma.str());

    Csv avg{"x", "eps", "avg_l2", "avg_l2_frequency", "gap", "cesaro"};
    for (const auto& r : rep.averages.rows) {
        std::optional<double> ces;
        for (const auto& c : rep.cesaro)
            if (c.x == r.x) ces = c.value;
        avg << r.x << r.eps << r.time_value << r.freq_value << r.gap << ces;
        avg.end();
    }
    write_file(dir / "averages.csv", avg.str());

    Csv series{"x", "y", "residual", "modulus_residual", "windowed_residual"};
    for (const auto& s : rep.series) {
        series << rep.series_x << s.y << s.residual << s.modulus_residual << s.windowed_residual;
        series.end();
    }
    write_file(dir / "series.csv", series.str());

    Csv zeros{"x", "z_lo", "z_hi", "count", "mass", "martin_mass"};
    const auto& zh = rep.zeros.histogram;
    for (std::size_t b = 0; b < zh.masses.size(); ++b) {
        std::optional<double> mm;
        if (rep.martin_bins) mm = rep.martin_bins->masses[b];
        zeros << rep.zeros_x << zh.bin_edges[b] << zh.bin_edges[b + 1] << rep.zeros.counts[b] << zh.masses[b] << mm;
        zeros.end();
    }
    write_file(dir / "zeros.csv", zeros.str());
}

} // namespace dirac
