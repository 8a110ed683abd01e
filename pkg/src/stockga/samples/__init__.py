from importlib import resources


def sample_text() -> str:
    """The 20-row, ten-member sample dataset shipped with the package."""
    return resources.files(__name__).joinpath("chain20.csv").read_text(encoding="utf-8")
