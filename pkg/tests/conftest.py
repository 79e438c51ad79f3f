import pytest

from tracealg import StoreSpace, TraceAlgebra, build


@pytest.fixture(scope="session")
def space():
    return StoreSpace()


@pytest.fixture(scope="session")
def stores(space):
    return {s.render(): s for s in space.stores}


@pytest.fixture(scope="session")
def shared(space):
    return build("S", space)


@pytest.fixture(scope="session")
def alg(space):
    return TraceAlgebra(space)
