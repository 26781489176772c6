#pragma once

// Shared test utilities: independent oracles and small numeric helpers.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <span>
#include <vector>

namespace testutil {

// Eigenvalues of a symmetric 3x3 matrix via cyclic Jacobi rotations
// (absolute accuracy ~eps * ||m||, good enough for near-singular PSD
// matrices), ascending.
inline std::array<double, 3> sym3_eigenvalues(std::array<std::array<double, 3>, 3> m) {
    for (int sweep = 0; sweep < 50; ++sweep) {
        double off = 0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += m[p][q] * m[p][q];
        if (off == 0.0) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (m[p][q] == 0.0) continue;
                const double theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double mkp = m[k][p], mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double mpk = m[p][k], mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                m[p][q] = m[q][p] = 0.0;
            }
        }
    }
    std::array<double, 3> eig{m[0][0], m[1][1], m[2][2]};
    std::sort(eig.begin(), eig.end());
    return eig;
}

// Brute-force empirical W_p over all assignments (N <= 9).
inline double wp_bruteforce(std::span<const double> a, std::span<const double> b, int n, int d,
                            int p) {
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    do {
        double total = 0;
        for (int i = 0; i < n; ++i) {
            double r2 = 0;
            for (int c = 0; c < d; ++c) {
                const double diff = a[static_cast<std::size_t>(i) * d + c] -
                                    b[static_cast<std::size_t>(perm[i]) * d + c];
                r2 += diff * diff;
            }
            total += p == 2 ? r2 : std::sqrt(r2);
        }
        best = std::min(best, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double mean = best / n;
    return p == 2 ? std::sqrt(mean) : mean;
}

struct SampleStats {
    double mean = 0;
    double var = 0;
};

inline SampleStats stats(std::span<const double> xs) {
    SampleStats s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    for (double x : xs) s.var += (x - s.mean) * (x - s.mean);
    s.var /= static_cast<double>(xs.size() - 1);
    return s;
}

}  // namespace testutil
