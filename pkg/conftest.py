import os
import sys

# Flat layout: make common/, exceptions/, api/ importable from tests
sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

os.environ.setdefault("POWERTOOLS_LOG_LEVEL", "WARNING")
