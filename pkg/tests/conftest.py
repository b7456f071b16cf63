"""Shared fixtures: rings, contexts, and the oracles module on sys.path."""

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from mfcalc.homalg import TruncationContext
from mfcalc.polyring import A_INFINITY, D_INFINITY, RingDescriptor


@pytest.fixture(scope="session")
def ring_a():
    return RingDescriptor(A_INFINITY, 1)


@pytest.fixture(scope="session")
def ring_d():
    return RingDescriptor(D_INFINITY, 1)


@pytest.fixture(scope="session")
def ctx32():
    return TruncationContext(32, 16)


@pytest.fixture(scope="session")
def ctx48():
    return TruncationContext(48, 16)
