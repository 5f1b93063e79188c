import pytest


def available_backends() -> list[str]:
    names = []
    try:
        import gridarena._kernel  # noqa: F401
        names.append("native")
    except ImportError:
        pass
    names.append("python")
    return names


BACKENDS = available_backends()


@pytest.fixture(params=BACKENDS)
def kernel_name(request):
    """Run the test once per available engine backend."""
    return request.param
