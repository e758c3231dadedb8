import pytest

from feistel_lab.bits import BitString, partition


@pytest.fixture
def leftmost_first_probe():
    """Shared block-convention probe: block 0 is the leftmost, most
    significant chunk of the flat state. Used by the structure and game
    suites so both pin the same layout."""
    flat = BitString(6, 0b110110)
    state = partition(flat, 2)
    expected = (BitString(2, 0b11), BitString(2, 0b01), BitString(2, 0b10))
    return flat, state, expected
