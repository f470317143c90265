"""Preperiodic points of z^2 + c over quadratic fields, computed exactly."""
