#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "abcx/types.hpp"

// Information measures in bits and the conditional-type grid machinery.
// Pure functions over the types in types.hpp; thread-safe.

namespace abcx {

double entropy_bits(std::span<const double> p);
double binary_entropy_bits(double q);

// sum p_i log2(p_i/q_i); +inf if p puts mass where q has none.
double kl_bits(std::span<const double> p, std::span<const double> q);

// sum_u P(u) D(V(.|u) || W(.|u)); rows with P(u)=0 are ignored.
double conditional_kl(const Channel& v, const Channel& w, const Distribution& p);

// I(P, V) with zero-probability input rows ignored.
double mutual_information(const Distribution& input, const Channel& v);

// I(X ^ Y | U) under P_UX x V where V: U x X -> Y (input index u*x_size+x).
double conditional_mutual_information(const UxDist& p_ux, const Channel& v);

// Mutual information of a rank-2 joint type, from the integer counts.
double mutual_information_of_type(const JointType& t);

// I-hat(a ^ b): mutual information of the joint type of the two sequences.
double empirical_mutual_info(const std::vector<int>& a, const std::vector<int>& b,
                             std::size_t a_size, std::size_t b_size);

// Low-level kernels on flat row-major matrices, shared by the solver.
namespace kernel {
// sum_r weight[r] * KL(v_row_r || w_row_r), weight-0 rows skipped; >= 0 or +inf.
double conditional_kl_flat(std::span<const double> v, std::span<const double> w,
                           std::span<const double> weights, std::size_t rows, std::size_t cols);
// I(weights, v) in bits, computed as min-divergence form; >= 0.
double mutual_information_flat(std::span<const double> weights, std::span<const double> v,
                               std::size_t rows, std::size_t cols);
}  // namespace kernel

// Visits every composition of `total` into `parts` non-negative integers in
// lexicographically increasing order, starting (0,...,0,total) and ending
// (total,0,...,0).
void for_each_composition(std::int64_t total, std::size_t parts,
                          const std::function<void(std::span<const std::int64_t>)>& visit);

// The conditional-type grid: every stochastic matrix whose row u has entries
// that are multiples of 1/(k*weight(u)), where weight(u) is the count of u in
// input_type. Zero-weight rows are fixed to the uniform row. Deterministic
// order: rows enumerated jointly with row 0 slowest, per-row compositions in
// for_each_composition order. The visitor receives the flat row-major matrix.
void for_each_conditional_type(std::size_t in_size, std::size_t out_size,
                               const JointType& input_type, std::int64_t k,
                               const std::function<void(std::span<const double>)>& visit);

// Materializing convenience wrapper.
std::vector<Channel> enumerate_conditional_types(std::size_t in_size, std::size_t out_size,
                                                 const JointType& input_type, std::int64_t k);

}  // namespace abcx
