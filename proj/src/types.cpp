#include "abcx/types.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace abcx {

namespace {

constexpr double kSumTolerance = 1e-12;

void normalize_in_place(std::vector<double>& p, const char* what) {
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw std::invalid_argument(std::string(what) + ": entries must be finite and >= 0");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance) {
        throw std::invalid_argument(std::string(what) + ": entries must sum to 1 within 1e-12, got " +
                                    std::to_string(sum));
    }
    if (sum != 1.0) {
        for (double& v : p) v /= sum;
    }
}

}  // namespace

Alphabet::Alphabet(std::size_t s) : size(s) {
    if (s == 0) throw std::invalid_argument("Alphabet: size must be >= 1");
}

Distribution::Distribution(Alphabet alphabet, std::vector<double> probs)
    : alphabet_(alphabet), p_(std::move(probs)) {
    if (p_.size() != alphabet_.size) {
        throw std::invalid_argument("Distribution: probability vector does not match alphabet size");
    }
    normalize_in_place(p_, "Distribution");
}

Channel::Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows)
    : input_(input), output_(output) {
    if (rows.size() != input_.size) {
        throw std::invalid_argument("Channel: expected one row per input symbol");
    }
    w_.reserve(input_.size * output_.size);
    for (auto& row : rows) {
        if (row.size() != output_.size) {
            throw std::invalid_argument("Channel: row length does not match output alphabet");
        }
        normalize_in_place(row, "Channel row");
        w_.insert(w_.end(), row.begin(), row.end());
    }
}

Channel Channel::from_flat(std::size_t in_size, std::size_t out_size, std::vector<double> flat) {
    if (flat.size() != in_size * out_size) {
        throw std::invalid_argument("Channel::from_flat: size mismatch");
    }
    std::vector<std::vector<double>> rows(in_size);
    for (std::size_t u = 0; u < in_size; ++u) {
        rows[u].assign(flat.begin() + static_cast<std::ptrdiff_t>(u * out_size),
                       flat.begin() + static_cast<std::ptrdiff_t>((u + 1) * out_size));
    }
    return Channel(Alphabet(in_size), Alphabet(out_size), std::move(rows));
}

Distribution Channel::row_distribution(std::size_t u) const {
    auto r = row(u);
    return Distribution(output_, std::vector<double>(r.begin(), r.end()));
}

JointType::JointType(std::vector<std::size_t> sizes, std::vector<std::int64_t> counts,
                     std::int64_t denominator)
    : sizes_(std::move(sizes)), counts_(std::move(counts)), n_(denominator) {
    if (sizes_.empty()) throw std::invalid_argument("JointType: needs at least one alphabet");
    if (n_ < 1) throw std::invalid_argument("JointType: denominator must be >= 1");
    std::size_t cells = 1;
    for (std::size_t s : sizes_) {
        if (s == 0) throw std::invalid_argument("JointType: alphabet size must be >= 1");
        cells *= s;
    }
    if (counts_.size() != cells) throw std::invalid_argument("JointType: counts tensor size mismatch");
    std::int64_t total = 0;
    for (std::int64_t c : counts_) {
        if (c < 0) throw std::invalid_argument("JointType: counts must be >= 0");
        total += c;
    }
    if (total != n_) throw std::invalid_argument("JointType: counts must sum to the denominator");
}

std::int64_t JointType::count(std::span<const std::size_t> index) const {
    if (index.size() != sizes_.size()) throw std::invalid_argument("JointType::count: rank mismatch");
    std::size_t flat = 0;
    for (std::size_t d = 0; d < sizes_.size(); ++d) {
        if (index[d] >= sizes_[d]) throw std::invalid_argument("JointType::count: index out of range");
        flat = flat * sizes_[d] + index[d];
    }
    return counts_[flat];
}

std::int64_t JointType::count2(std::size_t i, std::size_t j) const {
    const std::size_t idx[2] = {i, j};
    return count(idx);
}

Distribution JointType::distribution() const {
    std::vector<double> p(counts_.size());
    for (std::size_t i = 0; i < counts_.size(); ++i) {
        p[i] = static_cast<double>(counts_[i]) / static_cast<double>(n_);
    }
    return Distribution(Alphabet(counts_.size()), std::move(p));
}

JointType JointType::marginal(std::span<const std::size_t> keep_axes) const {
    if (keep_axes.empty()) throw std::invalid_argument("JointType::marginal: keep at least one axis");
    std::vector<std::size_t> out_sizes;
    out_sizes.reserve(keep_axes.size());
    for (std::size_t a : keep_axes) {
        if (a >= sizes_.size()) throw std::invalid_argument("JointType::marginal: axis out of range");
        out_sizes.push_back(sizes_[a]);
    }
    std::size_t out_cells = 1;
    for (std::size_t s : out_sizes) out_cells *= s;
    std::vector<std::int64_t> out_counts(out_cells, 0);

    std::vector<std::size_t> index(sizes_.size(), 0);
    for (std::size_t flat = 0; flat < counts_.size(); ++flat) {
        std::size_t out_flat = 0;
        for (std::size_t a : keep_axes) out_flat = out_flat * sizes_[a] + index[a];
        out_counts[out_flat] += counts_[flat];
        // odometer increment, last axis fastest
        for (std::size_t d = sizes_.size(); d-- > 0;) {
            if (++index[d] < sizes_[d]) break;
            index[d] = 0;
        }
    }
    return JointType(std::move(out_sizes), std::move(out_counts), n_);
}

JointType JointType::marginal(std::initializer_list<std::size_t> keep_axes) const {
    return marginal(std::span<const std::size_t>(keep_axes.begin(), keep_axes.size()));
}

JointType joint_type_of(const std::vector<std::vector<int>>& seqs,
                        const std::vector<std::size_t>& sizes) {
    if (seqs.empty() || seqs.size() != sizes.size()) {
        throw std::invalid_argument("joint_type_of: need one alphabet size per sequence");
    }
    const std::size_t n = seqs.front().size();
    if (n == 0) throw std::invalid_argument("joint_type_of: sequences must be non-empty");
    for (const auto& s : seqs) {
        if (s.size() != n) throw std::invalid_argument("joint_type_of: length mismatch");
    }
    std::size_t cells = 1;
    for (std::size_t s : sizes) cells *= s;
    std::vector<std::int64_t> counts(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t flat = 0;
        for (std::size_t d = 0; d < seqs.size(); ++d) {
            const int sym = seqs[d][i];
            if (sym < 0 || static_cast<std::size_t>(sym) >= sizes[d]) {
                throw std::invalid_argument("joint_type_of: symbol out of alphabet range");
            }
            flat = flat * sizes[d] + static_cast<std::size_t>(sym);
        }
        ++counts[flat];
    }
    return JointType(sizes, std::move(counts), static_cast<std::int64_t>(n));
}

JointType type_of_sequence(const std::vector<int>& seq, std::size_t size) {
    return joint_type_of({seq}, {size});
}

std::vector<int> zip_product(const std::vector<int>& u, const std::vector<int>& x,
                             std::size_t x_size) {
    if (u.size() != x.size()) throw std::invalid_argument("zip_product: length mismatch");
    std::vector<int> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = u[i] * static_cast<int>(x_size) + x[i];
    }
    return out;
}

namespace {

Channel conditional_rows(std::size_t u_size, std::size_t x_size, const std::vector<double>& joint,
                         const std::vector<double>& p_u) {
    std::vector<std::vector<double>> rows(u_size);
    for (std::size_t u = 0; u < u_size; ++u) {
        rows[u].resize(x_size);
        if (p_u[u] > 0.0) {
            for (std::size_t x = 0; x < x_size; ++x) rows[u][x] = joint[u * x_size + x] / p_u[u];
        } else {
            for (std::size_t x = 0; x < x_size; ++x) rows[u][x] = 1.0 / static_cast<double>(x_size);
        }
    }
    return Channel(Alphabet(u_size), Alphabet(x_size), std::move(rows));
}

}  // namespace

UxDist::UxDist(std::size_t u_size, std::size_t x_size, std::vector<double> probs)
    : u_size_(u_size),
      x_size_(x_size),
      joint_(Alphabet(u_size * x_size), std::move(probs)),
      p_u_(u_size, 0.0),
      x_given_u_(Alphabet(1), Alphabet(1), {{1.0}}) {
    for (std::size_t u = 0; u < u_size_; ++u) {
        for (std::size_t x = 0; x < x_size_; ++x) p_u_[u] += joint_[u * x_size_ + x];
    }
    x_given_u_ = conditional_rows(u_size_, x_size_, joint_.probs(), p_u_);
}

UxDist UxDist::from_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("UxDist: matrix must be non-empty");
    }
    const std::size_t x_size = rows.front().size();
    std::vector<double> flat;
    flat.reserve(rows.size() * x_size);
    for (const auto& r : rows) {
        if (r.size() != x_size) throw std::invalid_argument("UxDist: ragged matrix");
        flat.insert(flat.end(), r.begin(), r.end());
    }
    return UxDist(rows.size(), x_size, std::move(flat));
}

Distribution UxDist::marginal_u_dist() const { return Distribution(Alphabet(u_size_), p_u_); }

Distribution UxDist::marginal_x_dist() const {
    std::vector<double> p_x(x_size_, 0.0);
    for (std::size_t u = 0; u < u_size_; ++u) {
        for (std::size_t x = 0; x < x_size_; ++x) p_x[x] += joint_[u * x_size_ + x];
    }
    return Distribution(Alphabet(x_size_), std::move(p_x));
}

}  // namespace abcx
