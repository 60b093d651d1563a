#pragma once

// Data-parallel inner loops shared by the Gram and nearest-neighbour code.
// Each kernel has an OpenMP version and a serial reference in `serial::`.
// Both evaluate every output entry with the same arithmetic in the same order,
// so their results are bit-identical regardless of thread count.

#include <vector>

#include "sae_info/dataset_io.hpp"

namespace sae_info::kernels {

/// D(i,j) = sum_k (x_ik - x_jk)^2, symmetric with an exact zero diagonal.
Matrix pairwise_sq_distances(const Matrix& x);

/// K(i,j) = exp(-D(i,j) / (2 sigma^2)).
Matrix gaussian_from_sq_distances(const Matrix& sq_dist, double sigma);

/// Entrywise product A∘B.
Matrix hadamard(const Matrix& a, const Matrix& b);

/// Row i holds the Euclidean distances from point i to its k nearest other
/// points, ascending.
Matrix knn_distances(const Matrix& x, int k);

namespace serial {
Matrix pairwise_sq_distances(const Matrix& x);
Matrix gaussian_from_sq_distances(const Matrix& sq_dist, double sigma);
Matrix hadamard(const Matrix& a, const Matrix& b);
Matrix knn_distances(const Matrix& x, int k);
}  // namespace serial

}  // namespace sae_info::kernels
