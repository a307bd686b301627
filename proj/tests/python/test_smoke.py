import math

import numpy as np
import pytest
import scipy.sparse
import scipy.special

import tevlab


def fixture_pair():
    return tevlab.MediumPair(Sigma2=4.0, Lambda=4.0)


def test_disk_mesh_arrays():
    mesh = tevlab.mesh_unit_disk(2)
    v = mesh.vertices
    t = mesh.triangles
    assert v.shape == (mesh.num_vertices, 2)
    assert t.shape == (mesh.num_triangles, 3)
    assert np.all(np.hypot(v[:, 0], v[:, 1]) <= 1.0 + 1e-12)
    assert mesh.area == pytest.approx(math.pi, rel=0.05)


def test_rectangle_and_roundtrip():
    mesh = tevlab.mesh_rectangle(3, 2, tevlab.Point2(0, 0), tevlab.Point2(3, 2))
    assert mesh.num_triangles == 12
    again = tevlab.load_mesh(mesh.save())
    np.testing.assert_array_equal(again.triangles, mesh.triangles)
    with pytest.raises(tevlab.MeshError):
        tevlab.load_mesh("not a mesh")


def test_pencil_is_scipy_sparse_and_symmetric():
    p = tevlab.assemble_pencil(tevlab.mesh_unit_disk(2), fixture_pair())
    assert scipy.sparse.issparse(p.K) and scipy.sparse.issparse(p.M)
    assert p.K.shape == (p.size, p.size)
    assert abs(p.K - p.K.T).max() < 1e-13
    assert abs(p.M - p.M.T).max() < 1e-13


def test_window_matches_dense():
    p = tevlab.assemble_pencil(tevlab.mesh_unit_disk(2), fixture_pair())
    s = tevlab.spectrum_window(p, 40.0, sector=4.0)
    dense = [e.value for e in tevlab.dense_spectrum(p).entries if 1e-6 < abs(e.value) <= 40.0]
    assert s.total_multiplicity() == len(dense)
    assert s.count(40.0) == len(dense)


def test_bessel_against_scipy():
    for m in range(4):
        for x in (0.3, 2.0, 7.5, 15.0):
            assert tevlab.bessel_J(m, x) == pytest.approx(scipy.special.jv(m, x), abs=1e-12)
        for i in (1, 2, 3):
            assert tevlab.bessel_zero(m, i) == pytest.approx(scipy.special.jn_zeros(m, i)[-1], rel=1e-10)
    z = 3.0 + 1.5j
    assert tevlab.bessel_J_complex(2, z) == pytest.approx(scipy.special.jv(2, z), rel=1e-10)


def test_disk_oracle_roots():
    roots = tevlab.disk_eigenvalues(4.0, max_mode=4, k_max=6.0)
    assert roots
    for r in roots:
        assert r.value == pytest.approx(-r.k * r.k)
        if r.k.imag == 0:
            assert abs(tevlab.disk_determinant(r.mode, r.k.real, 4.0)) < 1e-8


def test_weyl_and_tauberian_constants():
    mesh = tevlab.mesh_unit_disk(3)
    pair = fixture_pair()
    c = tevlab.weyl_constant(mesh, pair)
    assert c == pytest.approx(mesh.area * 5.0 / (4.0 * math.pi), rel=1e-12)
    assert tevlab.tauberian_normalization(0.125) == pytest.approx(0.125 * math.pi / math.sin(0.125 * math.pi))
    moduli = np.arange(1, 400) / c
    est = tevlab.fit_weyl(sorted(moduli), float(moduli[-1]), c)
    assert est.relative_deviation < 0.01


def test_trace_identity_small_mesh():
    p = tevlab.assemble_pencil(tevlab.mesh_unit_disk(2), fixture_pair())
    r = tevlab.trace_identity_check(p, 100.0)
    assert r.rel_gap < 1e-10


def test_halfspace_solution():
    a1 = tevlab.SymMat2(2.0, 0.3, 1.0)
    a2 = tevlab.SymMat2(1.0, -0.2, 1.5)
    sol = tevlab.halfspace_solve(a1, a2, 1.0, 2.0, 5j, 1.7, 1.0 + 0.5j)
    res = tevlab.verify_halfspace(sol, [0.0, 0.5, 1.0, 2.0])
    assert res.ode < 1e-12 and res.jump < 1e-12 and res.flux < 1e-12
    assert res.decaying


def test_complementing_gap_and_kernel():
    frame = tevlab.boundary_frames(tevlab.mesh_unit_disk(1))[0]
    assert tevlab.complementing_gap(tevlab.SymMat2.identity(), tevlab.SymMat2.identity(), frame) == 0.0
    lead = tevlab.kernel_leading_coefficient(tevlab.SymMat2.identity(), 1.0, 1)
    assert tevlab.kernel_leading_coefficient(tevlab.SymMat2.identity(), 4.0, 1) == pytest.approx(4.0 * lead)


def test_cli_in_process(tmp_path):
    code, out, err = tevlab.run_cli(["--help"])
    assert code == 0 and "mesh" in out
    code, _, _ = tevlab.run_cli(["no-such-command"])
    assert code == 2
