import pytest

from pseudolinks import parse_diagram

TREFOIL = """
surface planar
crossing X c1 (1,4,2,5)
crossing X c2 (3,6,4,1)
crossing X c3 (5,2,6,3)
"""

# one kink on an unknot: loop edge 1, stem edge 2
KINK = """
surface planar
crossing X c1 (1,1,2,2)
"""

# closed 2-braid with two classical crossings
HOPF = """
surface planar
crossing X c1 (4,2,1,3)
crossing X c2 (2,4,3,1)
"""

# pseudo trefoil: same shadow as the trefoil, all crossings undetermined
PSEUDO_TREFOIL = """
surface planar
crossing P c1 (1,4,2,5)
crossing P c2 (3,6,4,1)
crossing P c3 (5,2,6,3)
prob c1 1/2
prob c2 1/2
prob c3 1/2
"""

# closed 2-braid: one classical crossing, two precrossings, axis inside
ANNULAR_PSEUDO_TREFOIL = """
surface annular
crossing X c1 (6,2,1,5)
crossing P c2 (2,4,3,1)
crossing P c3 (4,6,5,3)
edge 5 w=1
edge 6 w=1
face inner c1.1
face outer c1.3
prob c2 1/2
prob c3 1/2
"""

# (2,3) torus curve clasped by a null loop
TORUS_CLASP = """
surface toroidal
crossing X x1 (2,4,1,3)
crossing X x2 (4,2,3,1)
edge 2 w=(2,3)
"""


@pytest.fixture
def trefoil():
    return parse_diagram(TREFOIL)


@pytest.fixture
def kink():
    return parse_diagram(KINK)


@pytest.fixture
def hopf():
    return parse_diagram(HOPF)


@pytest.fixture
def pseudo_trefoil():
    return parse_diagram(PSEUDO_TREFOIL)


@pytest.fixture
def annular_pseudo_trefoil():
    return parse_diagram(ANNULAR_PSEUDO_TREFOIL)


@pytest.fixture
def torus_clasp():
    return parse_diagram(TORUS_CLASP)
