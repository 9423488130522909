# -*- coding: utf-8 -*-
"""Package declaring tclplus version."""
__version__ = "0.1.0"
