# Dynamics module
