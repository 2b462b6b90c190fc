"""Physical constants, CODATA 2018 exact SI values."""

HBAR = 1.054571817e-34      # reduced Planck constant (J s)
H_PLANCK = 6.62607015e-34   # Planck constant (J s)
E_CHARGE = 1.602176634e-19  # elementary charge (C)
K_B = 1.380649e-23          # Boltzmann constant (J/K)

FLUX_QUANTUM = H_PLANCK / (2.0 * E_CHARGE)  # Phi_0 = h/(2e), Wb
