import cmath
import math

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def disk_points(draw, rmax=0.95, rmin=0.0):
    r = draw(st.floats(rmin, rmax))
    t = draw(st.floats(-math.pi, math.pi))
    return cmath.rect(r, t)


@st.composite
def unit_complex(draw):
    return cmath.exp(1j * draw(st.floats(-math.pi, math.pi)))
