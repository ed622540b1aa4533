#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "tpk/curve.hpp"
#include "tpk/energy.hpp"

namespace tpk {

/// sum_{k=1}^{modes} (a_k cos 2 pi k u + b_k sin 2 pi k u) / k^2 with standard normal a_k, b_k.
Points random_smooth_field(int n, int dim, std::mt19937_64& rng, int modes = 4);

/// Cross energy of the strands (u, 0, 0) and (0, u, delta), u in [-1, 1], both directions.
double two_strand_cross_energy(double delta, const EnergyParams& params);

/// Deterministic report (JSON text) of the library's main checks for the given seed.
std::string run_study(std::uint64_t seed);

}  // namespace tpk
