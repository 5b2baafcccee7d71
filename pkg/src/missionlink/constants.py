"""Physical constants shared across the simulator.

Spherical Earth is assumed throughout: the geometry of service cones and
slant ranges does not warrant an oblate figure, only the J2 coefficient
enters (as a secular perturbation on orbit angles).
"""
import math

# Earth equatorial radius [km]
EARTH_RADIUS_KM = 6378.137

# Gravitational parameter GM [km^3/s^2]
MU_KM3_S2 = 398600.4418

# Second zonal harmonic of the geopotential (dimensionless)
J2 = 1.08262668e-3

# Speed of light [km/s]
SPEED_OF_LIGHT_KM_S = 299792.458

# Required secular node rate for a sun-synchronous orbit [rad/s]
# (one revolution of the ascending node per tropical year).
SUN_SYNC_NODE_RATE_RAD_S = 1.99096871e-7

# -10*log10(k), Boltzmann constant in W/(K*Hz), used in Es/N0 budgets [dB]
BOLTZMANN_TERM_DB = -10.0 * math.log10(1.380649e-23)
