import numpy as np
import pytest

from goaltime.space import DesignSpace, grid_1d


def test_grid_1d_covers_lattice():
    space = grid_1d(17, 80)
    assert len(space.candidates) == 64
    assert space.candidates[0] == (17.0,)
    assert space.candidates[-1] == (80.0,)
    assert space.dim == 1


def test_grid_1d_rejects_empty():
    with pytest.raises(ValueError):
        grid_1d(5, 4)


def test_normalize_maps_bounds_to_unit_box():
    space = DesignSpace(candidates=((0.0, 4.0), (24.0, 50.0)), lower=(0.0, 4.0), upper=(24.0, 50.0))
    normed = space.normalize(space.as_array())
    assert np.allclose(normed[0], [0.0, 0.0])
    assert np.allclose(normed[1], [1.0, 1.0])


def test_normalize_handles_degenerate_dimension():
    space = DesignSpace(candidates=((2.0, 1.0),), lower=(2.0, 0.0), upper=(2.0, 2.0))
    normed = space.normalize(space.as_array())
    assert np.allclose(normed, [[0.0, 0.5]])


def test_validation_rejects_bad_shapes():
    with pytest.raises(ValueError):
        DesignSpace(candidates=(), lower=(0.0,), upper=(1.0,))
    with pytest.raises(ValueError):
        DesignSpace(candidates=((0.0, 1.0),), lower=(0.0,), upper=(1.0,))
    with pytest.raises(ValueError):
        DesignSpace(candidates=((0.0,),), lower=(1.0,), upper=(0.0,))


def test_contains():
    space = grid_1d(1, 3)
    assert space.contains((2.0,))
    assert not space.contains((2.5,))
