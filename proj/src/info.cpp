#include "abcx/info.hpp"

#include <cmath>
#include <stdexcept>

namespace abcx {

double entropy_bits(std::span<const double> p) {
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log2(v);
    }
    return h < 0.0 ? 0.0 : h;
}

double binary_entropy_bits(double q) {
    double h = 0.0;
    if (q > 0.0) h -= q * std::log2(q);
    if (q < 1.0) h -= (1.0 - q) * std::log2(1.0 - q);
    return h;
}

double kl_bits(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("kl_bits: size mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) {
            if (q[i] <= 0.0) return kInf;
            d += p[i] * std::log2(p[i] / q[i]);
        }
    }
    return d < 0.0 ? 0.0 : d;
}

namespace kernel {

double conditional_kl_flat(std::span<const double> v, std::span<const double> w,
                           std::span<const double> weights, std::size_t rows, std::size_t cols) {
    double d = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double weight = weights[r];
        if (weight <= 0.0) continue;
        const double* vr = v.data() + r * cols;
        const double* wr = w.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            if (vr[c] > 0.0) {
                if (wr[c] <= 0.0) return kInf;
                d += weight * vr[c] * std::log2(vr[c] / wr[c]);
            }
        }
    }
    return d < 0.0 ? 0.0 : d;
}

double mutual_information_flat(std::span<const double> weights, std::span<const double> v,
                               std::size_t rows, std::size_t cols) {
    // I(P,V) = sum_r P(r) D(V(.|r) || q) with q the output marginal.
    double q[64];
    std::vector<double> q_heap;
    double* qp = q;
    if (cols > 64) {
        q_heap.assign(cols, 0.0);
        qp = q_heap.data();
    } else {
        for (std::size_t c = 0; c < cols; ++c) qp[c] = 0.0;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        const double weight = weights[r];
        if (weight <= 0.0) continue;
        const double* vr = v.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) qp[c] += weight * vr[c];
    }
    double mi = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        const double weight = weights[r];
        if (weight <= 0.0) continue;
        const double* vr = v.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) {
            if (vr[c] > 0.0 && qp[c] > 0.0) {
                mi += weight * vr[c] * std::log2(vr[c] / qp[c]);
            }
        }
    }
    return mi < 0.0 ? 0.0 : mi;
}

}  // namespace kernel

double conditional_kl(const Channel& v, const Channel& w, const Distribution& p) {
    if (v.in_size() != w.in_size() || v.out_size() != w.out_size() || p.size() != v.in_size()) {
        throw std::invalid_argument("conditional_kl: alphabet mismatch");
    }
    return kernel::conditional_kl_flat(v.flat(), w.flat(), p.span(), v.in_size(), v.out_size());
}

double mutual_information(const Distribution& input, const Channel& v) {
    if (input.size() != v.in_size()) throw std::invalid_argument("mutual_information: alphabet mismatch");
    return kernel::mutual_information_flat(input.span(), v.flat(), v.in_size(), v.out_size());
}

double conditional_mutual_information(const UxDist& p_ux, const Channel& v) {
    if (v.in_size() != p_ux.u_size() * p_ux.x_size()) {
        throw std::invalid_argument("conditional_mutual_information: channel input must be U x X");
    }
    const std::size_t nx = p_ux.x_size();
    const std::size_t ny = v.out_size();
    // I(X;Y|U) = sum_u P(u) I(X;Y | U=u)
    double total = 0.0;
    std::vector<double> cond_x(nx), rows_u(nx * ny);
    for (std::size_t u = 0; u < p_ux.u_size(); ++u) {
        const double pu = p_ux.marginal_u()[u];
        if (pu <= 0.0) continue;
        for (std::size_t x = 0; x < nx; ++x) {
            cond_x[x] = p_ux.p(u, x) / pu;
            for (std::size_t y = 0; y < ny; ++y) rows_u[x * ny + y] = v(u * nx + x, y);
        }
        total += pu * kernel::mutual_information_flat(cond_x, rows_u, nx, ny);
    }
    return total < 0.0 ? 0.0 : total;
}

double mutual_information_of_type(const JointType& t) {
    if (t.rank() != 2) throw std::invalid_argument("mutual_information_of_type: rank-2 type expected");
    const std::size_t na = t.sizes()[0];
    const std::size_t nb = t.sizes()[1];
    const auto& counts = t.counts();
    std::vector<std::int64_t> ra(na, 0), sb(nb, 0);
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            ra[a] += counts[a * nb + b];
            sb[b] += counts[a * nb + b];
        }
    }
    const double n = static_cast<double>(t.n());
    double mi = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
        for (std::size_t b = 0; b < nb; ++b) {
            const std::int64_t c = counts[a * nb + b];
            if (c > 0) {
                mi += (static_cast<double>(c) / n) *
                      std::log2(static_cast<double>(c) * n /
                                (static_cast<double>(ra[a]) * static_cast<double>(sb[b])));
            }
        }
    }
    return mi < 0.0 ? 0.0 : mi;
}

double empirical_mutual_info(const std::vector<int>& a, const std::vector<int>& b,
                             std::size_t a_size, std::size_t b_size) {
    return mutual_information_of_type(joint_type_of({a, b}, {a_size, b_size}));
}

void for_each_composition(std::int64_t total, std::size_t parts,
                          const std::function<void(std::span<const std::int64_t>)>& visit) {
    if (parts == 0) throw std::invalid_argument("for_each_composition: parts must be >= 1");
    std::vector<std::int64_t> c(parts, 0);
    c[parts - 1] = total;
    for (;;) {
        visit(c);
        // next composition in lexicographic order: find rightmost position
        // before the last with headroom in the tail.
        if (parts == 1) return;
        std::size_t i = parts - 1;
        while (i > 0 && c[i] == 0) --i;
        if (i == 0) return;  // (total, 0, ..., 0) is last
        const std::int64_t tail = c[i];
        c[i] = 0;
        ++c[i - 1];
        c[parts - 1] = tail - 1;
    }
}

void for_each_conditional_type(std::size_t in_size, std::size_t out_size,
                               const JointType& input_type, std::int64_t k,
                               const std::function<void(std::span<const double>)>& visit) {
    if (k < 1) throw std::invalid_argument("for_each_conditional_type: k must be >= 1");
    if (input_type.rank() != 1 || input_type.sizes()[0] != in_size) {
        throw std::invalid_argument("for_each_conditional_type: input type does not match alphabet");
    }
    // Per-row option lists. Zero-weight rows get the single uniform row.
    std::vector<std::vector<std::vector<double>>> options(in_size);
    for (std::size_t u = 0; u < in_size; ++u) {
        const std::int64_t weight = input_type.counts()[u];
        if (weight == 0) {
            options[u].push_back(std::vector<double>(out_size, 1.0 / static_cast<double>(out_size)));
            continue;
        }
        const std::int64_t denom = k * weight;
        for_each_composition(denom, out_size, [&](std::span<const std::int64_t> comp) {
            std::vector<double> row(out_size);
            for (std::size_t y = 0; y < out_size; ++y) {
                row[y] = static_cast<double>(comp[y]) / static_cast<double>(denom);
            }
            options[u].push_back(std::move(row));
        });
    }
    std::vector<double> flat(in_size * out_size, 0.0);
    std::vector<std::size_t> pick(in_size, 0);
    for (std::size_t u = 0; u < in_size; ++u) {
        const auto& row = options[u][0];
        std::copy(row.begin(), row.end(), flat.begin() + static_cast<std::ptrdiff_t>(u * out_size));
    }
    for (;;) {
        visit(flat);
        // odometer, last row fastest
        std::size_t u = in_size;
        while (u-- > 0) {
            if (++pick[u] < options[u].size()) {
                const auto& row = options[u][pick[u]];
                std::copy(row.begin(), row.end(),
                          flat.begin() + static_cast<std::ptrdiff_t>(u * out_size));
                break;
            }
            pick[u] = 0;
            const auto& row = options[u][0];
            std::copy(row.begin(), row.end(),
                      flat.begin() + static_cast<std::ptrdiff_t>(u * out_size));
            if (u == 0) return;
        }
    }
}

std::vector<Channel> enumerate_conditional_types(std::size_t in_size, std::size_t out_size,
                                                 const JointType& input_type, std::int64_t k) {
    std::vector<Channel> out;
    for_each_conditional_type(in_size, out_size, input_type, k,
                              [&](std::span<const double> flat) {
                                  out.push_back(Channel::from_flat(
                                      in_size, out_size,
                                      std::vector<double>(flat.begin(), flat.end())));
                              });
    return out;
}

}  // namespace abcx
