# Spectra module
