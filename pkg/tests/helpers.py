"""Independent oracles used across the test suite.

Everything here is built from first principles (explicit Kronecker
products, scipy.linalg.expm) so it shares no code path with the package
implementations it checks.
"""

import numpy as np
import scipy.linalg

ID2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)  # |1> is the up state
SZ = np.array([[-1, 0], [0, 1]], dtype=complex)  # +1 on |1>


def kron_chain(ops):
    out = np.array([[1.0 + 0j]])
    for op in ops:
        out = np.kron(out, op)
    return out


def site_op(op, site, n):
    return kron_chain([op if k == site else ID2 for k in range(1, n + 1)])


def bond_op(op_a, op_b, site, n):
    ops = [ID2] * n
    ops[site - 1] = op_a
    ops[site] = op_b
    return kron_chain(ops)


def xy_chain_hamiltonian(couplings, field, n):
    """Spin chain H = (B/2) sum sz_n - (j_n/2) sum (sx sx + sy sy), dense."""
    h = np.zeros((2**n, 2**n), dtype=complex)
    for site in range(1, n + 1):
        h += (field / 2.0) * site_op(SZ, site, n)
    for bond in range(1, n):
        h -= (couplings[bond - 1] / 2.0) * (
            bond_op(SX, SX, bond, n) + bond_op(SY, SY, bond, n)
        )
    return h


def expm_unitary(h, t):
    """Dense Pade-based exp(-i t h): independent of the eigh-based package path."""
    return scipy.linalg.expm(-1j * t * np.asarray(h))


def random_state_vector(dim, rng):
    vec = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return vec / np.linalg.norm(vec)


def random_graph_edges(n, rng, edge_prob=0.5):
    edges = set()
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < edge_prob:
                edges.add((a, b))
    return edges
