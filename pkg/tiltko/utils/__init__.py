# -*- coding: utf-8 -*-
"""
This package contains utility functions such as input checks, linear algebra
helpers, numba kernels and the simulation harness.
"""
