#include "dirac/martin.hpp"
#include "dirac/propagation.hpp"
#include "dirac/report.hpp"
#include "dirac/series.hpp"
#include "dirac/spectral.hpp"
#include "dirac/weyl.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

using namespace dirac;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

// Sends text to --out when given, else stdout.
void emit(const std::string& out, const std::string& text)
{
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f || !(f << text)) throw ConfigError("cannot write " + out);
}

std::string row(std::initializer_list<std::string> cells)
{
    std::string s;
    for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
    return s + "\n";
}

std::string fmt(double v) { return format_double(v); }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Numerical lab for half-line Dirac operators: propagation, Weyl disks, spectral measures, "
                 "Martin functions and the regularity report."};
    app.require_subcommand(1);
    const std::string phi_help = "operator data: zero | constant:C | chirp:A | gated_chirp:A,Q | periodic:P:V... | "
                                 "grid:H:V... | file:PATH (complex values as 1.5 or (1.5,-2))";

    std::string config_path, out;
    auto* report = app.add_subcommand("report", "run the full regularity report from an INI config");
    report->add_option("config", config_path, "config file")->required();
    report->add_option("--out", out, "output directory (overrides [output] dir)");

    std::string phi = "zero", xs = "100", zs = "(0,1)";
    auto* propagate = app.add_subcommand("propagate", "growth field h(x,z) and conservation residuals as CSV");
    propagate->add_option("--phi", phi, phi_help);
    propagate->add_option("--x", xs, "checkpoints, e.g. \"50 100 200\"");
    propagate->add_option("--z", zs, "spectral points, e.g. \"(2,1) (0,3)\"");
    propagate->add_option("--out", out, "output file (default stdout)");

    std::string z1 = "(0,1)";
    bool reflect = false;
    auto* disks = app.add_subcommand("disks", "Weyl disk centres and radii along x as CSV");
    disks->add_option("--phi", phi, phi_help);
    disks->add_option("--x", xs, "checkpoints");
    disks->add_option("--z", z1, "spectral point in the upper half plane");
    disks->add_flag("--reflect", reflect, "also report the disk of the reflected data");
    disks->add_option("--out", out, "output file (default stdout)");

    double x = 100.0, kmax = 10.0;
    int bins = 64;
    auto* sigma = app.add_subcommand("sigma", "binned sigma_x histogram as CSV");
    sigma->add_option("--phi", phi, phi_help);
    sigma->add_option("--x", x, "cut-off x > 0");
    sigma->add_option("--kmax", kmax, "histogram window [-kmax, kmax]");
    sigma->add_option("--bins", bins, "number of bins (>= 16)");
    sigma->add_option("--out", out, "output file (default stdout)");

    std::string ys = "8 16 32 64";
    double x0 = 0.0;
    auto* series = app.add_subcommand("series-check", "two-term growth residual over z = iy as CSV");
    series->add_option("--phi", phi, phi_help);
    series->add_option("--x", x, "endpoint x");
    series->add_option("--x0", x0, "start of the residual window (0 gives the literal residual)");
    series->add_option("--y", ys, "imaginary parts");
    series->add_option("--out", out, "output file (default stdout)");

    std::string gaps = "free", mz;
    auto* martin = app.add_subcommand("martin", "finite-gap Martin model as JSON");
    martin->add_option("--gaps", gaps, "gap list \"(a,b) (c,d)\" or free");
    martin->add_option("--z", mz, "optional points at which to evaluate M");
    martin->add_option("--out", out, "output file (default stdout)");

    std::string window = "(-3.2,3.2)";
    int zbins = 1;
    bool locate = false;
    auto* zeros = app.add_subcommand("zeros", "zero counting measure of u1 - u2 at x as CSV");
    zeros->add_option("--phi", phi, phi_help);
    zeros->add_option("--x", x, "cut-off x > 0");
    zeros->add_option("--window", window, "window \"(a,b)\"");
    zeros->add_option("--bins", zbins, "number of bins");
    zeros->add_flag("--locate", locate, "also list the zeros");
    zeros->add_option("--out", out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        if (code == 0) return 0;
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (*report) {
            auto cfg = load_config(config_path);
            if (!out.empty()) cfg.output_dir = out;
            const auto rep = run_report(cfg);
            write_report(rep, cfg.output_dir);
            std::cout << rep.verdict << " (bE = " << fmt(rep.model.bE) << ", outputs in " << cfg.output_dir.string()
                      << ")\n";
        } else if (*propagate) {
            const auto data = parse_phi(phi);
            const auto zl = parse_complex_list(zs);
            const auto xl = parse_real_list(xs);
            const auto field = growth_field(data, zl, xl);
            std::vector<Residuals> res(zl.size() * xl.size());
            for_each_index(res.size(), Exec::parallel, [&](std::size_t k) {
                res[k] = conservation_residuals(data, xl[k % xl.size()], zl[k / xl.size()]);
            });
            std::string text = row({"x", "z_re", "z_im", "h", "det_residual", "energy_residual"});
            for (std::size_t iz = 0; iz < zl.size(); ++iz)
                for (std::size_t ix = 0; ix < xl.size(); ++ix) {
                    const auto& r = res[iz * xl.size() + ix];
                    text += row({fmt(xl[ix]), fmt(zl[iz].real()), fmt(zl[iz].imag()), fmt(field.at(iz, ix)), fmt(r.det),
                                 fmt(r.energy)});
                }
            emit(out, text);
        } else if (*disks) {
            const auto data = parse_phi(phi);
            const cplx z = parse_complex(z1);
            const auto xl = parse_real_list(xs);
            const auto d = weyl_disks(data, xl, z);
            std::string text = reflect ? row({"x", "center_re", "center_im", "radius", "log_radius", "nested",
                                              "reflected_center_re", "reflected_center_im", "reflected_radius"})
                                       : row({"x", "center_re", "center_im", "radius", "log_radius", "nested"});
            for (std::size_t k = 0; k < d.size(); ++k) {
                const std::string nested = k == 0 ? "" : (nested_in(d[k], d[k - 1]) ? "1" : "0");
                std::string line = fmt(xl[k]) + "," + fmt(d[k].center.real()) + "," + fmt(d[k].center.imag()) + "," +
                                   fmt(d[k].radius) + "," + fmt(d[k].log_radius) + "," + nested;
                if (reflect) {
                    const auto r = reflected_disk(data, xl[k], z);
                    line += "," + fmt(r.center.real()) + "," + fmt(r.center.imag()) + "," + fmt(r.radius);
                }
                text += line + "\n";
            }
            emit(out, text);
        } else if (*sigma) {
            const auto s = sigma_summary(parse_phi(phi), x, kmax, bins);
            std::string text = "# route=" + to_string(s.route) + " total_mass=" + fmt(s.histogram.total_mass) +
                               " tail_mass=" + fmt(s.histogram.tail_mass) + " cesaro=" + fmt(s.cesaro) + "\n";
            text += row({"k_lo", "k_hi", "mass"});
            for (std::size_t b = 0; b < s.histogram.masses.size(); ++b)
                text += row({fmt(s.histogram.bin_edges[b]), fmt(s.histogram.bin_edges[b + 1]), fmt(s.histogram.masses[b])});
            emit(out, text);
        } else if (*series) {
            const auto data = parse_phi(phi);
            const auto yl = parse_real_list(ys);
            std::vector<GrowthResidual> r(yl.size());
            for_each_index(yl.size(), Exec::parallel,
                           [&](std::size_t k) { r[k] = growth_residual_between(data, x0, x, cplx(0.0, yl[k])); });
            std::vector<double> res, mres;
            std::string text;
            for (const auto& g : r) {
                res.push_back(g.residual);
                mres.push_back(g.modulus_residual);
            }
            text += "# x0=" + fmt(x0) + " x=" + fmt(x) + " loglog_slope=" + fmt(loglog_slope(yl, res)) +
                    " modulus_slope=" + fmt(loglog_slope(yl, mres)) + "\n";
            text += row({"y", "residual", "modulus_residual", "rate_re", "rate_im", "functional_re", "functional_im"});
            for (std::size_t k = 0; k < r.size(); ++k)
                text += row({fmt(yl[k]), fmt(r[k].residual), fmt(r[k].modulus_residual), fmt(r[k].rate.real()),
                             fmt(r[k].rate.imag()), fmt(r[k].functional.real()), fmt(r[k].functional.imag())});
            emit(out, text);
        } else if (*martin) {
            const auto model = martin_build(GapSet::parse(gaps));
            auto j = nlohmann::ordered_json::parse(martin_json(model));
            if (!mz.empty()) {
                const auto zl = parse_complex_list(mz);
                const auto m = martin_table(model, zl);
                auto vals = nlohmann::ordered_json::array();
                for (std::size_t k = 0; k < zl.size(); ++k) vals.push_back({zl[k].real(), zl[k].imag(), m[k]});
                j["values"] = vals;
            }
            emit(out, j.dump(2) + "\n");
        } else if (*zeros) {
            ZeroCountOptions opts;
            opts.locate = locate;
            const auto [lo, hi] = parse_interval(window);
            const auto z = zero_counting_detail(parse_phi(phi), x, lo, hi, zbins, opts);
            long total = 0;
            for (long c : z.counts) total += c;
            std::string text = "# x=" + fmt(x) + " total_count=" + std::to_string(total) +
                               " total_mass=" + fmt(z.histogram.total_mass) + "\n";
            text += row({"z_lo", "z_hi", "count", "mass"});
            for (std::size_t b = 0; b < z.counts.size(); ++b)
                text += row({fmt(z.histogram.bin_edges[b]), fmt(z.histogram.bin_edges[b + 1]), std::to_string(z.counts[b]),
                             fmt(z.histogram.masses[b])});
            for (double t : z.zeros) text += "# zero " + fmt(t) + "\n";
            emit(out, text);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidDataError& e) {
        std::cerr << "invalid data: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
