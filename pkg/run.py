#!/usr/bin/env python3
"""
Run script for periocular_eval.

Runs the command-line interface from a source checkout without installing
the package.
"""

import os
import sys

# Add the current directory to sys.path
sys.path.append(os.path.dirname(os.path.abspath(__file__)))

from periocular_eval.cli import main

if __name__ == '__main__':
    sys.exit(main())
