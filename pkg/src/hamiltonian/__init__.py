# Hamiltonian module
