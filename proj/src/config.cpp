#include "overdamp/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

#include "overdamp/text.hpp"

namespace overdamp {

namespace {

struct Entry {
    std::string key;
    std::string value;
    int line;
};

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> entries;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
        entries.push_back({std::string(trim(line.substr(0, eq))),
                           std::string(trim(line.substr(eq + 1))), line_no});
    }
    return entries;
}

[[noreturn]] void fail(const Entry& e, const std::string& why) {
    throw ParseError("line " + std::to_string(e.line) + ": key '" + e.key + "': " + why);
}

double parse_real(const Entry& e, std::string_view v) {
    double out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) fail(e, "expected a real number");
    return out;
}

double parse_real(const Entry& e) { return parse_real(e, e.value); }

long long parse_int(const Entry& e, std::string_view v) {
    long long out = 0;
    const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
    if (res.ec != std::errc{} || res.ptr != v.data() + v.size()) fail(e, "expected an integer");
    return out;
}

std::uint64_t parse_u64(const Entry& e) {
    std::uint64_t out = 0;
    const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), out);
    if (res.ec != std::errc{} || res.ptr != e.value.data() + e.value.size())
        fail(e, "expected an unsigned 64-bit integer");
    return out;
}

std::vector<std::string_view> split(std::string_view v, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
        const std::size_t c = v.find(sep, pos);
        parts.push_back(v.substr(pos, c == std::string_view::npos ? c : c - pos));
        if (c == std::string_view::npos) break;
        pos = c + 1;
    }
    return parts;
}

ExternalPotential parse_potential(const Entry& e) {
    const auto parts = split(e.value, ':');
    try {
        if (parts[0] == "zero" && parts.size() == 1) return ExternalPotential::zero();
        if (parts[0] == "harmonic" && parts.size() == 2)
            return ExternalPotential::harmonic(parse_real(e, parts[1]));
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& err) {
        fail(e, err.what());
    }
    fail(e, "expected 'zero' or 'harmonic:SCALE'");
}

InteractionKernel parse_kernel(const Entry& e) {
    const auto parts = split(e.value, ':');
    try {
        if (parts[0] == "zero" && parts.size() == 1) return InteractionKernel::zero();
        if (parts[0] == "smooth" && parts.size() == 1) return InteractionKernel::smooth_regular();
        if (parts[0] == "newtonian" && parts.size() == 3) {
            double sign = 0;
            if (parts[1] == "+") sign = 1;
            else if (parts[1] == "-") sign = -1;
            else fail(e, "newtonian sign must be '+' or '-'");
            return InteractionKernel::regularized_newtonian(sign, parse_real(e, parts[2]));
        }
        if (parts[0] == "powerlaw" && parts.size() == 3)
            return InteractionKernel::power_law(parse_real(e, parts[1]), parse_real(e, parts[2]));
    } catch (const ParseError&) {
        throw;
    } catch (const ConfigError& err) {
        fail(e, err.what());
    }
    fail(e, "expected 'zero', 'smooth', 'newtonian:+|-:EPS', or 'powerlaw:ALPHA:EPS'");
}

Integrator parse_integrator(const Entry& e) {
    if (e.value == "exp") return Integrator::ExponentialOU;
    if (e.value == "em") return Integrator::EulerMaruyama;
    fail(e, "expected 'exp' or 'em'");
}

// Later duplicates win, which is how --set overrides are applied.
bool apply_sim_key(SimConfig& cfg, const Entry& e) {
    if (e.key == "gamma") cfg.gamma = parse_real(e);
    else if (e.key == "n") cfg.n_particles = static_cast<int>(parse_int(e, e.value));
    else if (e.key == "dim") cfg.dim = static_cast<int>(parse_int(e, e.value));
    else if (e.key == "t_final") cfg.t_final = parse_real(e);
    else if (e.key == "dt") cfg.dt = parse_real(e);
    else if (e.key == "seed") cfg.seed = parse_u64(e);
    else if (e.key == "replicas") cfg.replicas = static_cast<int>(parse_int(e, e.value));
    else if (e.key == "potential") cfg.potential = parse_potential(e);
    else if (e.key == "kernel") cfg.kernel = parse_kernel(e);
    else if (e.key == "integrator") cfg.integrator = parse_integrator(e);
    else if (e.key == "x0_mean") cfg.x0_mean = parse_real(e);
    else if (e.key == "x0_var") cfg.x0_var = parse_real(e);
    else if (e.key == "v0_mean") cfg.v0_mean = parse_real(e);
    else if (e.key == "v0_var") cfg.v0_var = parse_real(e);
    else return false;
    return true;
}

void validate_with_lines(const SimConfig& cfg, const std::vector<Entry>& entries) {
    try {
        cfg.validate();
    } catch (const ConfigError& err) {
        int line = entries.empty() ? 0 : entries.back().line;
        throw ParseError("line " + std::to_string(line) + ": " + err.what());
    }
}

}  // namespace

SimConfig parse_sim_config(std::string_view text) {
    SimConfig cfg;
    const auto entries = tokenize(text);
    for (const auto& e : entries) {
        if (!apply_sim_key(cfg, e)) fail(e, "unknown key");
    }
    validate_with_lines(cfg, entries);
    return cfg;
}

RateStudySpec parse_rate_spec(std::string_view text) {
    RateStudySpec spec;
    const auto entries = tokenize(text);
    for (const auto& e : entries) {
        if (apply_sim_key(spec.base, e)) continue;
        if (e.key == "gamma_grid") {
            spec.gamma_grid.clear();
            for (const auto part : split(e.value, ',')) spec.gamma_grid.push_back(parse_real(e, trim(part)));
        } else if (e.key == "record_count") {
            spec.record_count = static_cast<int>(parse_int(e, e.value));
        } else {
            fail(e, "unknown key");
        }
    }
    spec.replicas = spec.base.replicas;
    try {
        spec.validate();
    } catch (const ConfigError& err) {
        int line = entries.empty() ? 0 : entries.back().line;
        throw ParseError("line " + std::to_string(line) + ": " + err.what());
    }
    return spec;
}

namespace {

std::string render_potential(const ExternalPotential& p) {
    switch (p.kind) {
        case ExternalPotential::Kind::Zero: return "zero";
        case ExternalPotential::Kind::Harmonic: return "harmonic:" + fmt_double(p.scale);
    }
    return "zero";
}

std::string render_kernel(const InteractionKernel& k) {
    switch (k.kind) {
        case InteractionKernel::Kind::Zero: return "zero";
        case InteractionKernel::Kind::SmoothRegular: return "smooth";
        case InteractionKernel::Kind::RegularizedNewtonian:
            return std::string("newtonian:") + (k.sign > 0 ? "+" : "-") + ":" + fmt_double(k.eps);
        case InteractionKernel::Kind::PowerLaw:
            return "powerlaw:" + fmt_double(k.alpha) + ":" + fmt_double(k.eps);
    }
    return "zero";
}

void render_sim_keys(std::ostringstream& os, const SimConfig& cfg) {
    os << "gamma=" << fmt_double(cfg.gamma) << '\n';
    os << "n=" << cfg.n_particles << '\n';
    os << "dim=" << cfg.dim << '\n';
    os << "t_final=" << fmt_double(cfg.t_final) << '\n';
    os << "dt=" << fmt_double(cfg.dt) << '\n';
    os << "seed=" << cfg.seed << '\n';
    os << "replicas=" << cfg.replicas << '\n';
    os << "potential=" << render_potential(cfg.potential) << '\n';
    os << "kernel=" << render_kernel(cfg.kernel) << '\n';
    os << "integrator=" << (cfg.integrator == Integrator::ExponentialOU ? "exp" : "em") << '\n';
    os << "x0_mean=" << fmt_double(cfg.x0_mean) << '\n';
    os << "x0_var=" << fmt_double(cfg.x0_var) << '\n';
    os << "v0_mean=" << fmt_double(cfg.v0_mean) << '\n';
    os << "v0_var=" << fmt_double(cfg.v0_var) << '\n';
}

}  // namespace

std::string render_config(const SimConfig& cfg) {
    std::ostringstream os;
    render_sim_keys(os, cfg);
    return os.str();
}

std::string render_rate_spec(const RateStudySpec& spec) {
    std::ostringstream os;
    SimConfig base = spec.base;
    base.replicas = spec.replicas;
    render_sim_keys(os, base);
    os << "gamma_grid=";
    for (std::size_t k = 0; k < spec.gamma_grid.size(); ++k) {
        if (k) os << ',';
        os << fmt_double(spec.gamma_grid[k]);
    }
    os << '\n';
    os << "record_count=" << spec.record_count << '\n';
    return os.str();
}

std::string apply_override(std::string text, std::string_view key_value) {
    if (key_value.find('=') == std::string_view::npos)
        throw ParseError("override '" + std::string(key_value) + "' is not of the form key=value");
    if (!text.empty() && text.back() != '\n') text += '\n';
    text += key_value;
    text += '\n';
    return text;
}

}  // namespace overdamp
