#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

// Finite-alphabet probability primitives. Everything here is immutable after
// construction and safe to share across threads. All information quantities
// in the project are in bits (log base 2), with the conventions
// 0*log(0) = 0 and q*log(q/0) = +inf for q > 0; +inf is represented by the
// IEEE infinity and propagates through min/max/addition absorbingly.

namespace abcx {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Alphabet {
    std::size_t size = 0;

    explicit Alphabet(std::size_t s);
    bool operator==(const Alphabet&) const = default;
};

// Probability vector over a finite alphabet. Entries must be non-negative and
// sum to 1 within 1e-12; the residual is normalized away exactly once here so
// later marginalizations do not accumulate drift.
class Distribution {
  public:
    Distribution(Alphabet alphabet, std::vector<double> probs);

    const Alphabet& alphabet() const { return alphabet_; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const std::vector<double>& probs() const { return p_; }
    std::span<const double> span() const { return p_; }

  private:
    Alphabet alphabet_;
    std::vector<double> p_;
};

// Row-stochastic matrix: one Distribution per input symbol, stored row-major.
class Channel {
  public:
    Channel(Alphabet input, Alphabet output, std::vector<std::vector<double>> rows);
    static Channel from_flat(std::size_t in_size, std::size_t out_size,
                             std::vector<double> flat);

    std::size_t in_size() const { return input_.size; }
    std::size_t out_size() const { return output_.size; }
    const Alphabet& input_alphabet() const { return input_; }
    const Alphabet& output_alphabet() const { return output_; }
    double operator()(std::size_t u, std::size_t y) const { return w_[u * output_.size + y]; }
    std::span<const double> row(std::size_t u) const {
        return {w_.data() + u * output_.size, output_.size};
    }
    const std::vector<double>& flat() const { return w_; }
    Distribution row_distribution(std::size_t u) const;

  private:
    Alphabet input_, output_;
    std::vector<double> w_;  // row-major, in_size x out_size
};

// Empirical joint distribution with integer counts and denominator n.
// counts is a flattened row-major tensor over the listed alphabets
// (first coordinate slowest).
class JointType {
  public:
    JointType(std::vector<std::size_t> sizes, std::vector<std::int64_t> counts,
              std::int64_t denominator);

    std::size_t rank() const { return sizes_.size(); }
    const std::vector<std::size_t>& sizes() const { return sizes_; }
    std::int64_t n() const { return n_; }
    const std::vector<std::int64_t>& counts() const { return counts_; }
    std::int64_t count(std::span<const std::size_t> index) const;
    std::int64_t count2(std::size_t i, std::size_t j) const;  // rank-2 convenience

    // Distribution over the product alphabet, counts/n.
    Distribution distribution() const;

    // Keeps the listed axes (in the given order), summing out the rest.
    JointType marginal(std::span<const std::size_t> keep_axes) const;
    JointType marginal(std::initializer_list<std::size_t> keep_axes) const;

    bool operator==(const JointType&) const = default;

  private:
    std::vector<std::size_t> sizes_;
    std::vector<std::int64_t> counts_;
    std::int64_t n_;
};

// Counts the tuples appearing across equal-length sequences. Every sequence
// must stay within its alphabet bound.
JointType joint_type_of(const std::vector<std::vector<int>>& seqs,
                        const std::vector<std::size_t>& sizes);
JointType type_of_sequence(const std::vector<int>& seq, std::size_t size);

// Encodes (u_i, x_i) pairs as one sequence over the product alphabet
// u * x_size + x.
std::vector<int> zip_product(const std::vector<int>& u, const std::vector<int>& x,
                             std::size_t x_size);

// Joint input distribution over U x X, stored flattened (u * x_size + x).
// Houses the fixed input law the exponent formulas are evaluated under.
class UxDist {
  public:
    UxDist(std::size_t u_size, std::size_t x_size, std::vector<double> probs);
    static UxDist from_matrix(const std::vector<std::vector<double>>& rows);

    std::size_t u_size() const { return u_size_; }
    std::size_t x_size() const { return x_size_; }
    double p(std::size_t u, std::size_t x) const { return joint_[u * x_size_ + x]; }
    const Distribution& joint() const { return joint_; }
    const std::vector<double>& marginal_u() const { return p_u_; }
    Distribution marginal_u_dist() const;
    Distribution marginal_x_dist() const;
    // P(x|u) rows; rows with P(u)=0 are uniform.
    const Channel& x_given_u() const { return x_given_u_; }

  private:
    std::size_t u_size_, x_size_;
    Distribution joint_;
    std::vector<double> p_u_;
    Channel x_given_u_;
};

}  // namespace abcx
