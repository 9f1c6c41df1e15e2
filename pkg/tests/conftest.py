import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

# exact big-rational cases vary a lot in run time, so wall-clock deadlines only add noise
settings.register_profile("exact", deadline=None)
settings.load_profile("exact")
