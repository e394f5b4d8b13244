import pytest

from beurling import scenarios


@pytest.fixture(scope="session")
def rational():
    return scenarios.build("rational")


@pytest.fixture(scope="session")
def rational_small():
    return scenarios.build("rational", x_max=1e4)


@pytest.fixture(scope="session")
def extra_prime():
    return scenarios.build("rational_plus_prime", q=1.5)


@pytest.fixture(scope="session")
def ex51():
    return scenarios.build("ex51")


@pytest.fixture(scope="session")
def ex52():
    return scenarios.build("ex52")


@pytest.fixture(scope="session")
def ex53():
    return scenarios.build("ex53")


@pytest.fixture(scope="session")
def ex53_discrete():
    return scenarios.build("ex53_discrete")


@pytest.fixture(scope="session")
def remark54():
    return scenarios.build("remark54")
