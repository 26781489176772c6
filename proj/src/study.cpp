#include "overdamp/study.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "overdamp/integrate.hpp"
#include "overdamp/metrics.hpp"
#include "overdamp/text.hpp"

namespace overdamp {

void RateStudySpec::validate() const {
    if (gamma_grid.size() < 3) throw ConfigError("gamma_grid needs at least 3 points");
    for (std::size_t k = 0; k < gamma_grid.size(); ++k) {
        if (!(gamma_grid[k] >= 1.0)) throw ConfigError("gamma_grid entries must be >= 1");
        if (k > 0 && !(gamma_grid[k] > gamma_grid[k - 1]))
            throw ConfigError("gamma_grid must be strictly increasing");
    }
    if (replicas < 1) throw ConfigError("replicas must be >= 1");
    if (record_count < 1) throw ConfigError("record_count must be >= 1");
    SimConfig probe = base;
    probe.gamma = gamma_grid.back();
    probe.validate();
}

FitLine fit_loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw std::domain_error("fit_loglog_slope: need at least 2 points");
    std::vector<double> lx, ly;
    for (const auto& [x, y] : points) {
        if (!(x > 0) || !(y > 0))
            throw std::domain_error("fit_loglog_slope: coordinates must be strictly positive");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        mx += lx[k];
        my += ly[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
        syy += (ly[k] - my) * (ly[k] - my);
    }
    FitLine fit;
    if (syy <= 1e-28 * n) {
        fit.slope = 0;
        fit.intercept = my;
        fit.r_squared = 1.0;
        return fit;
    }
    if (!(sxx > 0)) throw std::domain_error("fit_loglog_slope: degenerate x grid");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss_res = 0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
        ss_res += r * r;
    }
    fit.r_squared = 1.0 - ss_res / syy;
    return fit;
}

int worker_count() {
    if (const char* env = std::getenv("OVERDAMP_THREADS")) {
        const int w = std::atoi(env);
        if (w >= 1) return w;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

namespace {

struct ReplicaStat {
    double sup_msd = 0;
    double sup_m2_kin = 0;
    double sup_m2_od = 0;
};

ReplicaStat run_replica(const SimConfig& cfg, int record_count, std::uint32_t replica) {
    const auto times = uniform_record_times(cfg, record_count);
    const auto snaps = simulate_coupled(cfg, times, replica);
    ReplicaStat stat;
    for (const auto& s : snaps) {
        stat.sup_msd = std::max(stat.sup_msd, coupled_msd(s.kinetic.x, s.overdamped.x, s.kinetic.n,
                                                          s.kinetic.d));
        stat.sup_m2_kin =
            std::max(stat.sup_m2_kin, second_moment(s.kinetic.x, s.kinetic.n, s.kinetic.d));
        stat.sup_m2_od =
            std::max(stat.sup_m2_od, second_moment(s.overdamped.x, s.overdamped.n, s.overdamped.d));
    }
    return stat;
}

}  // namespace

RateFitResult run_rate_study(const RateStudySpec& spec) {
    spec.validate();
    const int n_gamma = static_cast<int>(spec.gamma_grid.size());
    const int m = spec.replicas;
    std::vector<ReplicaStat> stats(static_cast<std::size_t>(n_gamma) * m);
    std::vector<std::exception_ptr> errors(stats.size());

    const int workers = std::min<int>(worker_count(), static_cast<int>(stats.size()));
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            const int task = next.fetch_add(1);
            if (task >= static_cast<int>(stats.size())) return;
            const int gi = task / m;
            const int rep = task % m;
            SimConfig cfg = spec.base;
            cfg.gamma = spec.gamma_grid[gi];
            cfg.replicas = spec.replicas;
            try {
                stats[task] = run_replica(cfg, spec.record_count, static_cast<std::uint32_t>(rep));
            } catch (...) {
                errors[task] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    for (std::size_t task = 0; task < errors.size(); ++task) {
        if (errors[task]) {
            try {
                std::rethrow_exception(errors[task]);
            } catch (const std::exception& e) {
                throw std::runtime_error("rate study failed at gamma=" +
                                         fmt_double(spec.gamma_grid[task / m]) + " replica " +
                                         std::to_string(task % m) + ": " + e.what());
            }
        }
    }

    RateFitResult result;
    std::vector<std::pair<double, double>> points;
    for (int gi = 0; gi < n_gamma; ++gi) {
        GammaPoint pt;
        pt.gamma = spec.gamma_grid[gi];
        double mean = 0;
        for (int rep = 0; rep < m; ++rep) mean += stats[static_cast<std::size_t>(gi) * m + rep].sup_msd;
        mean /= m;
        double var = 0;
        for (int rep = 0; rep < m; ++rep) {
            const double diff = stats[static_cast<std::size_t>(gi) * m + rep].sup_msd - mean;
            var += diff * diff;
        }
        pt.sup_msd = mean;
        pt.mc_stderr = m > 1 ? std::sqrt(var / (m - 1) / m) : 0.0;
        for (int rep = 0; rep < m; ++rep) {
            const auto& st = stats[static_cast<std::size_t>(gi) * m + rep];
            pt.sup_moment2_kinetic += st.sup_m2_kin / m;
            pt.sup_moment2_overdamped += st.sup_m2_od / m;
        }
        result.per_gamma.push_back(pt);
        points.emplace_back(pt.gamma, pt.sup_msd);
    }

    const FitLine fit = fit_loglog_slope(points);
    result.slope = fit.slope;
    result.intercept = fit.intercept;
    result.r_squared = fit.r_squared;

    const auto& top = result.per_gamma.back();
    if (top.sup_msd < 10.0 * top.mc_stderr)
        result.warning = "sup_msd at the largest gamma is within 10x of its MC standard error; "
                         "increase the replica count";
    return result;
}

void emit_records(const RateFitResult& result, const RateStudySpec& spec, std::ostream& os) {
    if (result.per_gamma.empty()) throw std::domain_error("emit_records: empty per_gamma");
    os << "gamma,sup_msd,mc_stderr,n,dim,T,dt,integrator,eps\n";
    const char* integ = spec.base.integrator == Integrator::ExponentialOU ? "exp" : "em";
    for (const auto& pt : result.per_gamma) {
        os << fmt_double(pt.gamma) << ',' << fmt_double(pt.sup_msd) << ','
           << fmt_double(pt.mc_stderr) << ',' << spec.base.n_particles << ',' << spec.base.dim
           << ',' << fmt_double(spec.base.t_final) << ',' << fmt_double(spec.base.dt) << ','
           << integ << ',' << fmt_double(spec.base.kernel.eps) << '\n';
    }
}

void emit_summary_json(const RateFitResult& result, std::ostream& os) {
    os << "{\"slope\":" << fmt_double(result.slope)
       << ",\"intercept\":" << fmt_double(result.intercept)
       << ",\"r_squared\":" << fmt_double(result.r_squared) << ",\"warning\":\"" << result.warning
       << "\",\"per_gamma\":[";
    for (std::size_t k = 0; k < result.per_gamma.size(); ++k) {
        const auto& pt = result.per_gamma[k];
        if (k) os << ',';
        os << "{\"gamma\":" << fmt_double(pt.gamma) << ",\"sup_msd\":" << fmt_double(pt.sup_msd)
           << ",\"mc_stderr\":" << fmt_double(pt.mc_stderr)
           << ",\"sup_moment2_kinetic\":" << fmt_double(pt.sup_moment2_kinetic)
           << ",\"sup_moment2_overdamped\":" << fmt_double(pt.sup_moment2_overdamped) << '}';
    }
    os << "]}\n";
}

}  // namespace overdamp
