#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "schatten_qp/linalg.hpp"

namespace sqp {

using Rng = std::mt19937_64;

// Mixes a base seed with a tag and counter into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view tag, std::uint64_t counter = 0);

Matrix gaussian_matrix(int rows, int cols, Rng& rng);
Matrix random_matrix(int rows, int cols, std::uint64_t seed);

Matrix random_unitary(int d, Rng& rng);
Matrix random_unitary(int d, std::uint64_t seed);

// Normalized Wishart state G G^dagger / Tr, G of size d x rank.
Matrix random_density(int d, Rng& rng, int rank = -1);
Matrix random_density(int d, std::uint64_t seed);

// Trace-one PSD operator on d1 x d2 with the requested rank.
BipartiteOperator random_bipartite_psd(int d1, int d2, int rank, Rng& rng);
BipartiteOperator random_bipartite_psd(int d1, int d2, int rank, std::uint64_t seed);

// Random trace-one pure state projector.
Matrix random_pure(int d, Rng& rng);

}  // namespace sqp
