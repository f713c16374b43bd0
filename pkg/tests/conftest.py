import numpy as np
import pytest

from loopsoup.lattice import build_domain
from loopsoup.loops import LoopSoupSample, RwLoop, SoupConfig


def square_loop(x0, y0, side):
    """Counterclockwise boundary walk of a side x side square, root at (x0, y0)."""
    pts = [(x0 + i, y0) for i in range(side)]
    pts += [(x0 + side, y0 + i) for i in range(side)]
    pts += [(x0 + side - i, y0 + side) for i in range(side)]
    pts += [(x0, y0 + side - i) for i in range(side)]
    return pts


def rect_loop(x0, y0, w, h):
    pts = [(x0 + i, y0) for i in range(w)]
    pts += [(x0 + w, y0 + i) for i in range(h)]
    pts += [(x0 + w - i, y0 + h) for i in range(w)]
    pts += [(x0, y0 + h - i) for i in range(h)]
    return pts


def make_sample(loops, domain=None, c=1.0):
    """A sample holding exactly the given loops (draw record empty)."""
    domain = domain or build_domain("disk", radius=16)
    config = SoupConfig(domain, c, cutoff=2)
    return LoopSoupSample(config, [RwLoop(np.asarray(p)) for p in loops], np.zeros((0, 4), dtype=np.int64))


@pytest.fixture
def disk16():
    return build_domain("disk", radius=16)
