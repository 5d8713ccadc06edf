#pragma once

#include <cstdint>
#include <random>

#include "cifuse/linalg.hpp"

namespace cifuse {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index); the same pair always yields the same
/// sequence, whatever order streams are consumed in.
Rng make_stream(std::uint64_t seed, std::uint64_t index);

Matrix gaussian_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols);
double uniform01(Rng& rng);

/// Haar-ish orthogonal matrix from the QR of a Gaussian matrix.
Matrix random_orthogonal(Rng& rng, Eigen::Index n);

/// Random SPD matrix with eigenvalues log-uniform in [lo, hi].
SymMatrix random_spd(Rng& rng, Eigen::Index n, double lo, double hi);

/// Random p x n matrix of full row rank (p <= n).
Matrix random_full_row_rank(Rng& rng, Eigen::Index p, Eigen::Index n);

/// Random matrix with sigma_max exactly `sigma`.
Matrix random_contraction(Rng& rng, Eigen::Index rows, Eigen::Index cols, double sigma);

}  // namespace cifuse
