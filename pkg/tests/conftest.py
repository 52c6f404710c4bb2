import random
import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from spatialslice.abstract_graph import vertex_star_cuts  # noqa: E402
from spatialslice.diagram import load_fixture, underlying_graph  # noqa: E402
from spatialslice.framing import Framing, apply_cut_half_twists, blackboard  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

GRAPH_FIXTURES = ["theta", "theta3", "theta4", "handcuff", "hopf_handcuff", "theta_5", "theta3_scrambled", "k5",
                  "loop"]
KNOT_FIXTURES = ["unknot", "kink", "trefoil", "trefoil_mirror", "figure8", "square_knot", "granny_knot"]


def random_framing(d, rng: random.Random) -> Framing:
    """Blackboard plus random full twists and random vertex-cut half twists: always orientable."""
    g = underlying_graph(d)
    tw = {e: 2 * rng.randint(-1, 1) for e in g.edge_labels}
    f = Framing.of(d.name, tw)
    for cut in vertex_star_cuts(g):
        if rng.random() < 0.5:
            f = apply_cut_half_twists(f, cut, rng.choice((1, -1)))
    return f


@pytest.fixture
def fx():
    return load_fixture


@pytest.fixture
def bb():
    return blackboard
