#pragma once

#include <cmath>
#include <vector>

#include "abcx/types.hpp"

// Test-side oracles, written directly from the defining sums so they stay
// independent of the library's computation paths.

namespace testutil {

// I(A;B) in bits from an explicit joint probability table p[a][b].
inline double brute_mi(const std::vector<std::vector<double>>& p) {
    std::vector<double> pa(p.size(), 0.0), pb(p.front().size(), 0.0);
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p[a].size(); ++b) {
            pa[a] += p[a][b];
            pb[b] += p[a][b];
        }
    }
    double mi = 0.0;
    for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p[a].size(); ++b) {
            if (p[a][b] > 0.0) mi += p[a][b] * std::log2(p[a][b] / (pa[a] * pb[b]));
        }
    }
    return mi;
}

// I(X;Y|U) in bits from an explicit joint table p[u][x][y], by expanding the
// defining sum directly.
inline double brute_cmi(const std::vector<std::vector<std::vector<double>>>& p) {
    const std::size_t nu = p.size();
    const std::size_t nx = p.front().size();
    const std::size_t ny = p.front().front().size();
    double cmi = 0.0;
    for (std::size_t u = 0; u < nu; ++u) {
        double pu = 0.0;
        std::vector<double> px(nx, 0.0), py(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = 0; y < ny; ++y) {
                pu += p[u][x][y];
                px[x] += p[u][x][y];
                py[y] += p[u][x][y];
            }
        }
        if (pu <= 0.0) continue;
        for (std::size_t x = 0; x < nx; ++x) {
            for (std::size_t y = 0; y < ny; ++y) {
                if (p[u][x][y] > 0.0) {
                    cmi += p[u][x][y] * std::log2(pu * p[u][x][y] / (px[x] * py[y]));
                }
            }
        }
    }
    return cmi;
}

// Entropy in bits of an arbitrary vector (not necessarily normalized checks).
inline double brute_entropy(const std::vector<double>& p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h;
}

// Random stochastic matrix with strictly positive entries.
inline std::vector<std::vector<double>> random_stochastic(std::size_t rows, std::size_t cols,
                                                          abcx::Rng& rng) {
    std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
    for (auto& row : m) {
        double sum = 0.0;
        for (double& v : row) {
            v = 0.05 + rng.next_unit();
            sum += v;
        }
        for (double& v : row) v /= sum;
    }
    return m;
}

inline std::vector<double> random_simplex(std::size_t cells, abcx::Rng& rng) {
    std::vector<double> p(cells);
    double sum = 0.0;
    for (double& v : p) {
        v = 0.05 + rng.next_unit();
        sum += v;
    }
    for (double& v : p) v /= sum;
    return p;
}

}  // namespace testutil
