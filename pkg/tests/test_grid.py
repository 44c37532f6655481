import numpy as np
import pytest

from cavityflow.grid import (
    GridSpec,
    ScalarField,
    VelocityField,
    cell_index,
    divergence,
    sample_velocity,
)


def naive_divergence(field):
    """Independent triple-loop divergence oracle."""
    n = field.spec.n
    h = field.spec.h
    u, v, w = field.components()
    out = np.zeros(n**3)
    for k in range(n):
        for j in range(n):
            for i in range(n):
                out[i + n * j + n * n * k] = (
                    u[i + 1, j, k] - u[i, j, k]
                    + v[i, j + 1, k] - v[i, j, k]
                    + w[i, j, k + 1] - w[i, j, k]
                ) / h
    return out


class TestGridSpec:
    def test_side_length(self):
        assert GridSpec(10, 0.5).side_length == 5.0

    def test_rejects_bad_sizes(self):
        with pytest.raises(ValueError):
            GridSpec(0)
        with pytest.raises(ValueError):
            GridSpec(4, h=0.0)


class TestCellIndex:
    def test_origin(self):
        assert cell_index(GridSpec(4), 0, 0, 0) == 0

    def test_last_cell(self):
        assert cell_index(GridSpec(4), 3, 3, 3) == 63

    def test_hand_case(self):
        assert cell_index(GridSpec(4), 1, 2, 3) == 57

    def test_bijective(self):
        spec = GridSpec(3)
        seen = {
            cell_index(spec, i, j, k)
            for k in range(3)
            for j in range(3)
            for i in range(3)
        }
        assert seen == set(range(27))


class TestSampleVelocity:
    def test_constant_field(self, rng):
        spec = GridSpec(4, 0.5)
        f = VelocityField(spec)
        f.u[:] = 2.5
        f.v[:] = 2.5
        f.w[:] = 2.5
        for _ in range(20):
            p = rng.random(3) * spec.side_length
            assert np.allclose(sample_velocity(f, p), 2.5, rtol=0, atol=1e-15)

    def test_lattice_node_exactness(self, rng):
        spec = GridSpec(4)
        f = VelocityField(spec)
        f.u[:] = rng.standard_normal(f.u.shape)
        # u face (i, j, k) sits at (i*h, (j+0.5)h, (k+0.5)h)
        for i, j, k in ((0, 0, 0), (2, 1, 3), (4, 3, 3)):
            got = sample_velocity(f, (i * 1.0, (j + 0.5), (k + 0.5)))[0]
            assert got == f.u[i, j, k]

    def test_linear_in_x_exact(self):
        spec = GridSpec(5, 0.4)
        f = VelocityField(spec)
        a = 1.7
        for i in range(6):
            f.u[i, :, :] = a * (i * spec.h)
        for x in (0.3, 0.77, 1.5):
            got = sample_velocity(f, (x, 1.0, 1.0))[0]
            assert got == pytest.approx(a * x, rel=1e-14)

    def test_affine_fields_exact(self, rng):
        # trilinear interpolation has linear precision on each component lattice
        spec = GridSpec(4, 0.7)
        h = spec.n and spec.h
        f = VelocityField(spec)
        coef = rng.standard_normal((3, 4))  # per component: c0 + cx x + cy y + cz z

        def fill(arr, offsets, c):
            na, nb, nc = arr.shape
            for i in range(na):
                for j in range(nb):
                    for k in range(nc):
                        x = (i + offsets[0]) * h
                        y = (j + offsets[1]) * h
                        z = (k + offsets[2]) * h
                        arr[i, j, k] = c[0] + c[1] * x + c[2] * y + c[3] * z

        fill(f.u, (0.0, 0.5, 0.5), coef[0])
        fill(f.v, (0.5, 0.0, 0.5), coef[1])
        fill(f.w, (0.5, 0.5, 0.0), coef[2])
        for _ in range(10):
            # stay inside every lattice hull: half a cell away from the walls
            p = h * 0.5 + rng.random(3) * (spec.side_length - h)
            got = sample_velocity(f, p)
            want = [c[0] + c[1] * p[0] + c[2] * p[1] + c[3] * p[2] for c in coef]
            np.testing.assert_allclose(got, want, rtol=1e-13, atol=1e-13)

    def test_clamping_outside_domain(self):
        spec = GridSpec(3)
        f = VelocityField(spec)
        f.u[:] = 1.0
        far = sample_velocity(f, (100.0, -50.0, 100.0))
        assert far[0] == 1.0

    def test_non_finite_point_rejected(self):
        f = VelocityField(GridSpec(2))
        with pytest.raises(ValueError, match="non-finite"):
            sample_velocity(f, (np.nan, 0.0, 0.0))


class TestDivergence:
    def test_uniform_field_interior_zero(self):
        spec = GridSpec(4)
        f = VelocityField(spec)
        f.u[:] = 1.0
        f.u[0, :, :] = 0.0
        f.u[4, :, :] = 0.0
        div = divergence(f).as_3d()
        assert np.all(div[1:3, :, :] == 0.0)

    def test_single_face_stencil(self):
        spec = GridSpec(2)
        f = VelocityField(spec)
        f.u[1, 0, 0] = 1.0  # face between cells (0,0,0) and (1,0,0)
        div = divergence(f)
        assert div.data[0] == 1.0
        assert div.data[1] == -1.0
        assert np.count_nonzero(div.data) == 2

    def test_matches_naive_oracle(self, rng):
        spec = GridSpec(4, 0.3)
        f = VelocityField(spec)
        f.u[:] = rng.standard_normal(f.u.shape)
        f.v[:] = rng.standard_normal(f.v.shape)
        f.w[:] = rng.standard_normal(f.w.shape)
        np.testing.assert_allclose(divergence(f).data, naive_divergence(f), rtol=1e-13, atol=1e-13)

    def test_telescoping_sum_zero_with_closed_walls(self, rng):
        spec = GridSpec(5, 0.9)
        f = VelocityField(spec)
        f.u[:] = rng.standard_normal(f.u.shape)
        f.v[:] = rng.standard_normal(f.v.shape)
        f.w[:] = rng.standard_normal(f.w.shape)
        for arr, axis in ((f.u, 0), (f.v, 1), (f.w, 2)):
            sl = [slice(None)] * 3
            sl[axis] = 0
            arr[tuple(sl)] = 0.0
            sl[axis] = spec.n
            arr[tuple(sl)] = 0.0
        total = spec.h**3 * divergence(f).data.sum()
        assert abs(total) < 1e-12


class TestScalarField:
    def test_as_3d_is_a_view_in_cell_index_order(self):
        spec = GridSpec(3)
        s = ScalarField(spec)
        s.data[cell_index(spec, 1, 2, 0)] = 7.0
        assert s.as_3d()[1, 2, 0] == 7.0
        s.as_3d()[0, 0, 2] = 3.0
        assert s.data[cell_index(spec, 0, 0, 2)] == 3.0

    def test_length_validation(self):
        with pytest.raises(ValueError):
            ScalarField(GridSpec(2), np.zeros(7))
