#include "abcx/codec.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "abcx/info.hpp"

namespace abcx {

std::size_t message_count(std::size_t n, double rate) {
    if (rate < 0.0) throw std::invalid_argument("message_count: rate must be >= 0");
    const double x = std::exp2(static_cast<double>(n) * rate);
    if (x > 1e18) throw std::invalid_argument("message_count: 2^(nR) too large");
    return static_cast<std::size_t>(std::max(1.0, std::ceil(x - 1e-9)));
}

std::vector<int> sample_from_type_class(const JointType& type, Rng& rng) {
    if (type.rank() != 1) throw std::invalid_argument("sample_from_type_class: rank-1 type expected");
    std::vector<int> seq;
    seq.reserve(static_cast<std::size_t>(type.n()));
    for (std::size_t a = 0; a < type.sizes()[0]; ++a) {
        seq.insert(seq.end(), static_cast<std::size_t>(type.counts()[a]), static_cast<int>(a));
    }
    rng.shuffle(seq);
    return seq;
}

std::vector<int> sample_from_shell(const std::vector<int>& u, const JointType& p_ux, Rng& rng) {
    if (p_ux.rank() != 2) throw std::invalid_argument("sample_from_shell: rank-2 joint type expected");
    const std::size_t nu = p_ux.sizes()[0];
    const std::size_t nx = p_ux.sizes()[1];
    if (type_of_sequence(u, nu) != p_ux.marginal({0})) {
        throw std::invalid_argument("sample_from_shell: u composition does not match the joint type");
    }
    // Independent uniform arrangement of the conditional multiset within each
    // u-symbol position class.
    std::vector<int> x(u.size());
    for (std::size_t a = 0; a < nu; ++a) {
        std::vector<int> symbols;
        for (std::size_t b = 0; b < nx; ++b) {
            symbols.insert(symbols.end(), static_cast<std::size_t>(p_ux.count2(a, b)),
                           static_cast<int>(b));
        }
        rng.shuffle(symbols);
        std::size_t next = 0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] == static_cast<int>(a)) x[i] = symbols[next++];
        }
    }
    return x;
}

Codebook sample_codebook(const JointType& p_ux, double r1, double r2, std::uint64_t seed,
                         std::size_t message_cap) {
    if (p_ux.rank() != 2) throw std::invalid_argument("sample_codebook: rank-2 joint type expected");
    const std::size_t n = static_cast<std::size_t>(p_ux.n());
    const std::size_t m1 = message_count(n, r1);
    const std::size_t m2 = message_count(n, r2);
    if (m1 > message_cap || m2 > message_cap || m1 * m2 > message_cap) {
        throw std::invalid_argument("sample_codebook: message count exceeds the safety cap");
    }
    Codebook cb;
    cb.n = n;
    cb.p_ux = p_ux;
    cb.seed = seed;
    const JointType u_type = p_ux.marginal({0});
    Rng rng(derive_seed(seed, "codebook", 0));
    cb.clouds.reserve(m2);
    cb.satellites.reserve(m2);
    for (std::size_t j = 0; j < m2; ++j) {
        cb.clouds.push_back(sample_from_type_class(u_type, rng));
        std::vector<std::vector<int>> sats;
        sats.reserve(m1);
        for (std::size_t i = 0; i < m1; ++i) {
            sats.push_back(sample_from_shell(cb.clouds.back(), p_ux, rng));
        }
        cb.satellites.push_back(std::move(sats));
    }
    return cb;
}

namespace detail {

namespace {
constexpr double kCompareGuard = 1e-12;

// Empirical MI from integer counts, reusing one counts buffer.
double mi_from_counts(std::vector<std::int64_t>& counts, std::size_t na, std::size_t nb,
                      std::size_t n) {
    std::vector<std::int64_t> ra(na, 0), sb(nb, 0);
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            ra[a] += counts[a * nb + b];
            sb[b] += counts[a * nb + b];
        }
    }
    const double dn = static_cast<double>(n);
    double mi = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
        if (ra[a] == 0) continue;
        for (std::size_t b = 0; b < nb; ++b) {
            const std::int64_t c = counts[a * nb + b];
            if (c > 0) {
                mi += (static_cast<double>(c) / dn) *
                      std::log2(static_cast<double>(c) * dn /
                                (static_cast<double>(ra[a]) * static_cast<double>(sb[b])));
            }
        }
    }
    return mi < 0.0 ? 0.0 : mi;
}

double pair_mi(const std::vector<int>& u, const std::vector<int>& x, const std::vector<int>& y,
               std::size_t nu, std::size_t nx, std::size_t ny,
               std::vector<std::int64_t>& counts) {
    const std::size_t na = nu * nx;
    counts.assign(na * ny, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const std::size_t a =
            static_cast<std::size_t>(u[i]) * nx + static_cast<std::size_t>(x[i]);
        counts[a * ny + static_cast<std::size_t>(y[i])]++;
    }
    return mi_from_counts(counts, na, ny, y.size());
}

double single_mi(const std::vector<int>& u, const std::vector<int>& y, std::size_t nu,
                 std::size_t ny, std::vector<std::int64_t>& counts) {
    counts.assign(nu * ny, 0);
    for (std::size_t i = 0; i < y.size(); ++i) {
        counts[static_cast<std::size_t>(u[i]) * ny + static_cast<std::size_t>(y[i])]++;
    }
    return mi_from_counts(counts, nu, ny, y.size());
}
}  // namespace

std::vector<double> pair_empirical_mi(const std::vector<int>& y, const Codebook& cb,
                                      std::size_t y_size) {
    std::vector<double> mi(cb.m1_count() * cb.m2_count());
    std::vector<std::int64_t> counts;
    for (std::size_t m2 = 0; m2 < cb.m2_count(); ++m2) {
        for (std::size_t m1 = 0; m1 < cb.m1_count(); ++m1) {
            mi[m2 * cb.m1_count() + m1] = pair_mi(cb.clouds[m2], cb.satellites[m2][m1], y,
                                                  cb.u_size(), cb.x_size(), y_size, counts);
        }
    }
    return mi;
}

std::vector<double> cloud_empirical_mi(const std::vector<int>& y, const Codebook& cb,
                                       std::size_t y_size) {
    std::vector<double> mi(cb.m2_count());
    std::vector<std::int64_t> counts;
    for (std::size_t m2 = 0; m2 < cb.m2_count(); ++m2) {
        mi[m2] = single_mi(cb.clouds[m2], y, cb.u_size(), y_size, counts);
    }
    return mi;
}

std::vector<std::size_t> satisfiers_exhaustive(std::span<const double> mi, double r,
                                               double r_tilde, double lambda) {
    std::vector<std::size_t> sat;
    for (std::size_t p = 0; p < mi.size(); ++p) {
        double worst = 0.0;
        for (std::size_t q = 0; q < mi.size(); ++q) {
            if (q == p) continue;
            worst = std::max(worst, positive_part(mi[q] - r));
        }
        if (mi[p] >= r_tilde + lambda * worst - kCompareGuard) sat.push_back(p);
    }
    return sat;
}

std::vector<std::size_t> satisfiers_fast(std::span<const double> mi, double r, double r_tilde,
                                         double lambda) {
    // max and second max of the penalty terms give every index its worst
    // competitor in O(1); max() over doubles is exact, so this reproduces the
    // exhaustive scan bit for bit.
    double max1 = 0.0, max2 = 0.0;
    std::size_t max1_count = 0;
    for (double v : mi) {
        const double pen = positive_part(v - r);
        if (pen > max1) {
            max2 = max1;
            max1 = pen;
            max1_count = 1;
        } else if (pen == max1) {
            ++max1_count;
        } else if (pen > max2) {
            max2 = pen;
        }
    }
    std::vector<std::size_t> sat;
    for (std::size_t p = 0; p < mi.size(); ++p) {
        const double pen = positive_part(mi[p] - r);
        const double worst = (mi.size() <= 1)                ? 0.0
                             : (pen == max1 && max1_count == 1) ? max2
                                                                : max1;
        if (mi[p] >= r_tilde + lambda * worst - kCompareGuard) sat.push_back(p);
    }
    return sat;
}

DecodeOutcome decode_y_with(const std::vector<int>& y, const Codebook& cb,
                            const DecodeThresholds& th, std::size_t y_size, bool exhaustive) {
    if (y.size() != cb.n) throw std::invalid_argument("decode_y: length mismatch");
    const auto mi = pair_empirical_mi(y, cb, y_size);
    const auto sat1 = exhaustive ? satisfiers_exhaustive(mi, th.r12, th.r12_tilde, th.lambda12)
                                 : satisfiers_fast(mi, th.r12, th.r12_tilde, th.lambda12);
    if (sat1.size() == 1) {
        const std::size_t p = sat1.front();
        return DecodeOutcome{p % cb.m1_count(), p / cb.m1_count(), DecodeOutcome::Stage::Step1};
    }
    const auto cmi = cloud_empirical_mi(y, cb, y_size);
    const auto sat2 = exhaustive ? satisfiers_exhaustive(cmi, th.r2, th.r2_tilde, th.lambda2)
                                 : satisfiers_fast(cmi, th.r2, th.r2_tilde, th.lambda2);
    if (sat2.size() == 1) {
        return DecodeOutcome{std::nullopt, sat2.front(), DecodeOutcome::Stage::Step2};
    }
    return DecodeOutcome{std::nullopt, std::nullopt, DecodeOutcome::Stage::DoubleErasure};
}

}  // namespace detail

DecodeOutcome decode_y(const std::vector<int>& y, const Codebook& cb, const RateConfig& rc,
                       std::size_t y_size) {
    return detail::decode_y_with(y, cb, DecodeThresholds::from(rc), y_size, /*exhaustive=*/false);
}

DecodeOutcome decode_y_exhaustive(const std::vector<int>& y, const Codebook& cb,
                                  const RateConfig& rc, std::size_t y_size) {
    return detail::decode_y_with(y, cb, DecodeThresholds::from(rc), y_size, /*exhaustive=*/true);
}

std::optional<std::size_t> decode_z(const std::vector<int>& z, const Codebook& cb,
                                    const RateConfig& rc, std::size_t z_size) {
    if (z.size() != cb.n) throw std::invalid_argument("decode_z: length mismatch");
    const auto mi = detail::cloud_empirical_mi(z, cb, z_size);
    const auto sat = detail::satisfiers_fast(mi, rc.r2(), rc.r2_tilde(), rc.lambda2());
    if (sat.size() == 1) return sat.front();
    return std::nullopt;
}

}  // namespace abcx
