#include "overdamp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace overdamp {

double coupled_msd(std::span<const double> a, std::span<const double> b, int n, int d) {
    if (a.size() != b.size() || a.size() != static_cast<std::size_t>(n) * d)
        throw std::domain_error("coupled_msd: shape mismatch");
    double acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double diff = a[k] - b[k];
        acc += diff * diff;
    }
    return acc / n;
}

double second_moment(std::span<const double> xs, int n, int d) {
    if (xs.empty() || xs.size() != static_cast<std::size_t>(n) * d)
        throw std::domain_error("second_moment: shape mismatch or empty input");
    double acc = 0;
    for (double x : xs) acc += x * x;
    return acc / n;
}

double w2_empirical_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || a.size() != b.size())
        throw std::domain_error("w2_empirical_1d: inputs must be nonempty and of equal size");
    std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    double acc = 0;
    for (std::size_t k = 0; k < sa.size(); ++k) {
        const double diff = sa[k] - sb[k];
        acc += diff * diff;
    }
    return std::sqrt(acc / static_cast<double>(sa.size()));
}

namespace {

// Hungarian algorithm with potentials, O(n^3).
double min_assignment_cost(const std::vector<double>& cost, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    auto c = [&](int i, int j) { return cost[static_cast<std::size_t>(i - 1) * n + (j - 1)]; };
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = c(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0;
    for (int j = 1; j <= n; ++j) total += c(p[j], j);
    return total;
}

}  // namespace

double wp_assignment_exact(std::span<const double> a, std::span<const double> b, int n, int d,
                           int p) {
    if (n > 512) throw CapacityError("wp_assignment_exact: N exceeds the 512-sample limit");
    if (p != 1 && p != 2) throw std::domain_error("wp_assignment_exact: p must be 1 or 2");
    if (n < 1 || a.size() != b.size() || a.size() != static_cast<std::size_t>(n) * d)
        throw std::domain_error("wp_assignment_exact: shape mismatch");

    std::vector<double> cost(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double r2 = 0;
            for (int c = 0; c < d; ++c) {
                const double diff = a[static_cast<std::size_t>(i) * d + c] -
                                    b[static_cast<std::size_t>(j) * d + c];
                r2 += diff * diff;
            }
            cost[static_cast<std::size_t>(i) * n + j] = p == 2 ? r2 : std::sqrt(r2);
        }
    }
    const double total = min_assignment_cost(cost, n);
    const double mean = std::max(0.0, total) / n;
    return p == 2 ? std::sqrt(mean) : mean;
}

ModulusReport modulus_probe(std::span<const double> times,
                            const std::vector<std::vector<double>>& frames, int n, int d,
                            std::span<const double> delta_grid) {
    if (times.size() != frames.size() || times.size() < 2)
        throw std::domain_error("modulus_probe: need at least two frames with matching times");
    const double spacing = times[1] - times[0];
    if (!(spacing > 0)) throw std::domain_error("modulus_probe: times must be increasing");
    for (std::size_t k = 1; k < times.size(); ++k)
        if (std::abs(times[k] - times[k - 1] - spacing) > 1e-9 * std::max(1.0, spacing))
            throw std::domain_error("modulus_probe: times must be uniformly spaced");
    const double horizon = times.back() - times.front();

    ModulusReport rep;
    for (double delta : delta_grid) {
        if (delta < 0 || delta > horizon + 1e-12)
            throw std::domain_error("modulus_probe: delta outside the recorded horizon");
        const std::int64_t lag = std::llround(delta / spacing);
        if (std::abs(lag * spacing - delta) > 1e-9 * std::max(1.0, delta))
            throw std::domain_error("modulus_probe: delta does not lie on the frame grid");
        double acc = 0;
        std::size_t count = 0;
        for (std::size_t s = 0; s + lag < frames.size(); ++s) {
            acc += coupled_msd(frames[s + lag], frames[s], n, d);
            ++count;
        }
        rep.points.push_back({delta, count ? acc / count : 0.0});
    }
    for (const auto& pt : rep.points) {
        if (pt.delta <= 0) continue;
        const double env = pt.delta + std::sqrt(pt.delta);
        rep.c_fit = std::max(rep.c_fit, pt.mean_square_increment / env);
    }
    return rep;
}

}  // namespace overdamp
