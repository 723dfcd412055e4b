"""
Shared pytest setup: make ``utils`` and ``scripts`` importable the way the scripts do.
"""

import os
import sys

src_dir = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if src_dir not in sys.path:
    sys.path.insert(0, src_dir)
