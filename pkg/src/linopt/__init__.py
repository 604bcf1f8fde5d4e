"""linopt: finite-depth random passive linear-optical circuit toolkit.

Samples random brickwall/brickwork/custom circuits, computes the Renyi-2
entanglement of equally-squeezed inputs by independent routes, verifies the
circuit <-> classical-random-walk moment identities, estimates mixing and
pi-meeting times, and compresses circuits by effective-band zeroing.
"""

from .backend import active_backend
from .compress import (CompressionResult, Gate, banded_compress,
                       effective_bandwidth, gate_count_naive, reck_decompose,
                       reconstruct)
from .gaussian import (EntropyResult, Subsystem, build_W, check_bounds,
                       renyi2_cov, renyi2_eig, renyi2_series)
from .geometry import (GeometrySpec, Pairing, brickwall_geometry,
                       brickwork_d_geometry, custom_geometry, lightcone_band,
                       octahedral_geometry)
from .moments import (MomentEstimate, fourth_moment, haar_reference,
                      second_moment, uut_second_moment)
from .numerics import (hermitian_eigenvalues, hs_norm, logdet_spd,
                       unitarity_defect)
from .sampler import (CircuitSample, RngStream, haar_phase, haar_u2,
                      haar_unitary, sample_circuit, sample_layer)
from .walk import (WalkKernel, layer_kernel, meeting_time, meeting_time_tail,
                   mixing_time, reflect_map, step_kernel, tv_distance,
                   verify_boson_rw, verify_reflection, walk_distribution)

__version__ = "0.1.0"
