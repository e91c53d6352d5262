"""Physical constants shared across the package (SI units)."""

# Mean Earth radius [m] and standard gravitational parameter [m^3/s^2].
EARTH_RADIUS_M = 6371.0e3
MU_EARTH_M3_S2 = 3.986004418e14

# Speed of light [m/s] and Boltzmann constant [J/K].
LIGHT_SPEED_M_S = 2.998e8
BOLTZMANN_J_K = 1.380649e-23
