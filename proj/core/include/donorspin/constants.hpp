#pragma once

// Fundamental constants, CODATA 2018, SI units.

namespace donorspin::constants {

inline constexpr double mu0 = 1.25663706212e-6;         // vacuum permeability [N/A^2]
inline constexpr double g_e_free = 2.00231930436256;    // free-electron g factor
inline constexpr double mu_bohr = 9.2740100783e-24;     // Bohr magneton [J/T]
inline constexpr double mu_nuclear = 5.0507837461e-27;  // nuclear magneton [J/T]
inline constexpr double planck = 6.62607015e-34;        // Planck constant [J s], exact
inline constexpr double boltzmann = 1.380649e-23;       // Boltzmann constant [J/K], exact
inline constexpr double bohr_radius = 5.29177210903e-11;  // [m]

}  // namespace donorspin::constants
