"""Numerical services: thermodynamics, fluxes, shocks, stability and Mach stems."""
