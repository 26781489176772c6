// Command-line driver: simulate, rate-study, validate, w2.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "overdamp/config.hpp"
#include "overdamp/integrate.hpp"
#include "overdamp/metrics.hpp"
#include "overdamp/study.hpp"
#include "overdamp/text.hpp"

namespace fs = std::filesystem;
using namespace overdamp;

namespace {

constexpr const char* kVersion = "overdamp 1.0.0";

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string load_config_text(const std::string& config_path,
                             const std::vector<std::string>& overrides,
                             const std::optional<std::uint64_t>& seed) {
    std::string text = config_path.empty() ? std::string() : read_file(config_path);
    for (const auto& kv : overrides) text = apply_override(text, kv);
    if (seed) text = apply_override(text, "seed=" + std::to_string(*seed));
    return text;
}

void write_manifest(const fs::path& out_dir, const std::string& canonical_config,
                    std::uint64_t seed) {
    std::ostringstream os;
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical_config)));
    os << "{\"tool\":\"" << kVersion << "\",\"config_hash\":\"" << hash << "\",\"seed\":" << seed
       << "}\n";
    write_file(out_dir / "manifest.json", os.str());
}

std::vector<std::vector<double>> read_samples(const std::string& path, int& n, int& d) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sample file: " + path);
    std::vector<std::vector<double>> pts;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<double> pt;
        double v;
        while (ls >> v) pt.push_back(v);
        if (pt.empty()) continue;
        if (!pts.empty() && pt.size() != pts.front().size())
            throw ConfigError("inconsistent point dimension in " + path);
        pts.push_back(std::move(pt));
    }
    if (pts.empty()) throw ConfigError("no points in " + path);
    n = static_cast<int>(pts.size());
    d = static_cast<int>(pts.front().size());
    return pts;
}

int cmd_simulate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::optional<std::uint64_t>& seed, const std::string& out,
                 int record_count, bool dump_positions) {
    const SimConfig cfg = parse_sim_config(load_config_text(config_path, overrides, seed));
    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    write_manifest(out_dir, render_config(cfg), cfg.seed);

    std::vector<double> times{0.0};
    for (double t : uniform_record_times(cfg, record_count)) times.push_back(t);

    std::ostringstream gap;
    gap << "t,msd,moment2_kinetic,moment2_overdamped\n";
    std::vector<CoupledSnapshot> last;
    for (int rep = 0; rep < cfg.replicas; ++rep) {
        auto snaps = simulate_coupled(cfg, times, static_cast<std::uint32_t>(rep));
        for (const auto& s : snaps) {
            GapRecord rec{s.t, coupled_msd(s.kinetic.x, s.overdamped.x, s.kinetic.n, s.kinetic.d),
                          second_moment(s.kinetic.x, s.kinetic.n, s.kinetic.d),
                          second_moment(s.overdamped.x, s.overdamped.n, s.overdamped.d)};
            gap << fmt_double(rec.t) << ',' << fmt_double(rec.msd) << ','
                << fmt_double(rec.moment2_kinetic) << ',' << fmt_double(rec.moment2_overdamped)
                << '\n';
        }
        last = std::move(snaps);
    }
    write_file(out_dir / "gap.csv", gap.str());

    if (dump_positions && !last.empty()) {
        std::ostringstream kin, od;
        const auto& s = last.back();
        for (int i = 0; i < s.kinetic.n; ++i) {
            for (int c = 0; c < s.kinetic.d; ++c) {
                if (c) kin << ' ';
                kin << fmt_double(s.kinetic.x[static_cast<std::size_t>(i) * s.kinetic.d + c]);
            }
            kin << '\n';
            for (int c = 0; c < s.overdamped.d; ++c) {
                if (c) od << ' ';
                od << fmt_double(s.overdamped.x[static_cast<std::size_t>(i) * s.overdamped.d + c]);
            }
            od << '\n';
        }
        write_file(out_dir / "kinetic_positions.txt", kin.str());
        write_file(out_dir / "overdamped_positions.txt", od.str());
    }
    return 0;
}

int cmd_rate_study(const std::string& config_path, const std::vector<std::string>& overrides,
                   const std::optional<std::uint64_t>& seed, const std::string& out) {
    const RateStudySpec spec = parse_rate_spec(load_config_text(config_path, overrides, seed));
    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    write_manifest(out_dir, render_rate_spec(spec), spec.base.seed);

    const RateFitResult result = overdamp::run_rate_study(spec);
    {
        std::ostringstream csv;
        emit_records(result, spec, csv);
        write_file(out_dir / "rate.csv", csv.str());
    }
    {
        std::ostringstream json;
        emit_summary_json(result, json);
        write_file(out_dir / "summary.json", json.str());
    }
    if (!result.warning.empty()) std::cerr << "warning: " << result.warning << '\n';
    std::cout << "slope=" << fmt_double(result.slope) << " r_squared=" << fmt_double(result.r_squared)
              << '\n';
    return 0;
}

int cmd_validate(const std::string& config_path, const std::vector<std::string>& overrides,
                 const std::optional<std::uint64_t>& seed, const std::string& out,
                 double radius, int n_probes) {
    const SimConfig cfg = parse_sim_config(load_config_text(config_path, overrides, seed));
    const fs::path out_dir(out);
    fs::create_directories(out_dir);
    write_manifest(out_dir, render_config(cfg), cfg.seed);

    std::ostringstream rep;
    rep << "potential assumption probe (radius=" << fmt_double(radius)
        << ", probes=" << n_probes << ")\n";
    bool all_pass = true;
    for (double r : {0.0, 1.0, 2.0, 4.0}) {
        const auto report = validate_assumption_phi(cfg.potential, r, radius, n_probes);
        all_pass = all_pass && report.pass;
        rep << "r=" << fmt_double(r) << " sup|gradPhi|^r e^{-Phi}=" << fmt_double(report.sup_weighted_grad)
            << " sup|gradPhi|/(1+|x|)=" << fmt_double(report.sup_growth_ratio)
            << " sup Lipschitz ratio=" << fmt_double(report.sup_lipschitz_ratio)
            << " min Phi=" << fmt_double(report.min_value) << (report.pass ? " PASS" : " FAIL")
            << '\n';
    }
    rep << (all_pass ? "all assumptions satisfied on the probe grid\n"
                     : "assumption violation detected on the probe grid\n");
    write_file(out_dir / "validate_report.txt", rep.str());
    std::cout << rep.str();
    return 0;
}

int cmd_w2(const std::string& file_a, const std::string& file_b, int p) {
    int na = 0, da = 0, nb = 0, db = 0;
    const auto pa = read_samples(file_a, na, da);
    const auto pb = read_samples(file_b, nb, db);
    if (na != nb || da != db) throw ConfigError("sample files must have matching shape");
    std::vector<double> flat_a, flat_b;
    for (const auto& pt : pa) flat_a.insert(flat_a.end(), pt.begin(), pt.end());
    for (const auto& pt : pb) flat_b.insert(flat_b.end(), pt.begin(), pt.end());
    double w;
    if (da == 1 && p == 2) {
        w = w2_empirical_1d(flat_a, flat_b);
    } else {
        w = wp_assignment_exact(flat_a, flat_b, na, da, p);
    }
    std::cout << fmt_double(w) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coupled kinetic/overdamped Langevin particle simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, out = ".";
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    int record_count = 64;
    bool dump_positions = false;
    double radius = 10.0;
    int n_probes = 100000;
    int p = 2;
    std::string file_a, file_b;

    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* opt = sub->add_option("--config", config_path, "config file (key=value lines)");
        if (config_required) opt->required();
        sub->add_option("--set", overrides, "override key=value (repeatable)");
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "seed override");
    };

    auto* sim = app.add_subcommand("simulate", "run one coupled simulation per replica");
    add_common(sim, true);
    sim->add_option("--records", record_count, "number of record times");
    sim->add_flag("--dump-positions", dump_positions, "write final position samples");

    auto* rate = app.add_subcommand("rate-study", "sweep gamma and fit the log-log rate");
    add_common(rate, true);

    auto* val = app.add_subcommand("validate", "probe the external-potential assumptions");
    add_common(val, true);
    val->add_option("--radius", radius, "probe radius");
    val->add_option("--probes", n_probes, "number of probe points");

    auto* w2 = app.add_subcommand("w2", "empirical Wasserstein distance between two sample files");
    w2->add_option("file_a", file_a, "first sample file")->required();
    w2->add_option("file_b", file_b, "second sample file")->required();
    w2->add_option("--p", p, "Wasserstein order (1 or 2)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, overrides, seed, out, record_count, dump_positions);
        if (rate->parsed()) return cmd_rate_study(config_path, overrides, seed, out);
        if (val->parsed()) return cmd_validate(config_path, overrides, seed, out, radius, n_probes);
        if (w2->parsed()) return cmd_w2(file_a, file_b, p);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
