"""Validation of OCL constraints stored in Asset Administration Shells."""
