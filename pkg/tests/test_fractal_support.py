import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fractalcalc.errors import DomainError, NoConvergence, SpecError
from fractalcalc.fractal_support import (
    CANTOR,
    VON_KOCH,
    CurveGeneratorSpec,
    IfsSetSpec,
    Staircase,
    build_curve,
    build_set,
    coarse_mass,
    estimate_dimension,
    euclidean_reach,
    load_spec,
    on_support,
    parse_spec_text,
    rise_function,
    similarity_dimension,
    staircase_of_set,
    write_staircase_csv,
)

from conftest import CANTOR_ALPHA, KOCH_ALPHA

GAMMA_CANTOR = 0.8973709406726663548414973745604865259752  # Gamma(1 + ln2/ln3)
INV_GAMMA_KOCH = 0.876603109987811972341939617411416366465  # 1/Gamma(1 + ln4/ln3)


class TestSpecs:
    def test_too_few_maps(self):
        with pytest.raises(SpecError):
            IfsSetSpec(((0.5, 0.0),))

    @pytest.mark.parametrize("r", [0.0, 1.0, -0.2])
    def test_bad_ratio(self, r):
        with pytest.raises(SpecError):
            IfsSetSpec(((r, 0.0), (0.3, 0.7)))

    def test_overlap(self):
        with pytest.raises(SpecError):
            IfsSetSpec(((0.5, 0.0), (0.5, 0.4)))

    def test_maps_sorted(self):
        spec = IfsSetSpec(((0.25, 0.75), (0.25, 0.0)))
        assert spec.maps[0][1] == 0.0

    def test_curve_endpoints(self):
        with pytest.raises(SpecError):
            CurveGeneratorSpec([[0, 0], [0.5, 0.2], [0.9, 0.0]])

    def test_curve_segment_length(self):
        with pytest.raises(SpecError):
            CurveGeneratorSpec([[0, 0], [1, 0], [1, 0]])

    def test_similarity_dimensions(self):
        assert similarity_dimension(CANTOR.ratios) == pytest.approx(CANTOR_ALPHA, rel=1e-15)
        assert similarity_dimension(VON_KOCH.ratios) == pytest.approx(KOCH_ALPHA, rel=1e-15)
        # unequal ratios 1/2 and 1/4: s solves 2^-s + 4^-s = 1, golden-ratio root
        s = similarity_dimension([0.5, 0.25])
        assert s == pytest.approx(math.log2((1 + math.sqrt(5)) / 2), rel=1e-12)

    def test_parse_builtin(self):
        spec = load_spec("koch")
        assert spec.kind == "curve" and spec.depth == 6 and spec.alpha is None
        np.testing.assert_allclose(spec.spec.generator, VON_KOCH.generator, atol=1e-15)
        assert load_spec("cantor").spec.maps == CANTOR.maps

    def test_parse_file(self, tmp_path):
        p = tmp_path / "s.txt"
        p.write_text("# comment\nkind=set\nmaps=1/4:0; 1/4:3/4\ndepth=3\nalpha=0.5\n")
        spec = load_spec(str(p))
        assert spec.alpha == 0.5 and spec.depth == 3
        assert spec.spec.maps == ((0.25, 0.0), (0.25, 0.75))

    @pytest.mark.parametrize(
        "text",
        ["kind=blob", "kind=set", "kind=set\nmaps=1/3", "kind=curve", "no equals sign", "kind=set\nmaps=x:0;1/3:2/3"],
    )
    def test_parse_errors(self, text):
        with pytest.raises(SpecError):
            parse_spec_text(text)

    def test_unknown_spec(self):
        with pytest.raises(SpecError):
            load_spec("no-such-support")


class TestSet:
    def test_depth(self):
        approx = build_set(CANTOR, 5)
        assert approx.intervals.shape == (32, 2)
        np.testing.assert_allclose(approx.lengths, 3.0**-5)
        assert approx.domain == (0.0, 1.0)

    def test_negative_depth(self):
        with pytest.raises(DomainError):
            build_set(CANTOR, -1)

    @pytest.mark.parametrize("depth", [1, 4, 12])
    def test_total(self, depth):
        S = staircase_of_set(build_set(CANTOR, depth), CANTOR_ALPHA)
        assert S.total == pytest.approx(GAMMA_CANTOR, rel=1e-12)

    def test_self_similarity(self):
        # depth d on [0, 1/3] is a half-mass copy of depth d - 1 on [0, 1]
        S = staircase_of_set(build_set(CANTOR, 10), CANTOR_ALPHA)
        coarse = staircase_of_set(build_set(CANTOR, 9), CANTOR_ALPHA)
        z = np.linspace(0, 1, 101)
        np.testing.assert_allclose(S(z / 3), coarse(z) / 2, atol=1e-14)
        np.testing.assert_allclose(S(2 / 3 + z / 3), S(1 / 3) + coarse(z) / 2, atol=1e-14)
        assert S(0.5) == pytest.approx(GAMMA_CANTOR / 2, rel=1e-14)

    def test_flat_on_gaps(self):
        approx = build_set(CANTOR, 6)
        S = staircase_of_set(approx, CANTOR_ALPHA)
        for a, b in S.gaps:
            assert S(a) == S(b) == S(0.5 * (a + b))
        assert len(S.gaps) == 2**6 - 1

    def test_coarse_mass(self):
        approx = build_set(CANTOR, 8)
        assert coarse_mass(approx, CANTOR_ALPHA, 0, 1 / 3) == pytest.approx(GAMMA_CANTOR / 2, rel=1e-12)
        assert coarse_mass(approx, CANTOR_ALPHA, 0.4, 0.6) == 0.0
        with pytest.raises(DomainError):
            coarse_mass(approx, CANTOR_ALPHA, 0.5, 0.2)
        with pytest.raises(DomainError):
            coarse_mass(approx, 1.5, 0, 1)

    @given(st.floats(0, 1), st.floats(0, 1))
    def test_coarse_mass_matches_staircase(self, a, b):
        a, b = min(a, b), max(a, b)
        approx = build_set(CANTOR, 7)
        S = staircase_of_set(approx, CANTOR_ALPHA)
        # the staircase interpolates linearly inside intervals, the mass clips with power alpha;
        # they agree when both ends sit on interval endpoints
        edges = np.unique(approx.intervals)
        a = edges[np.searchsorted(edges, a, side="left").clip(0, len(edges) - 1)]
        b = edges[np.searchsorted(edges, b, side="left").clip(0, len(edges) - 1)]
        a, b = min(a, b), max(a, b)
        assert coarse_mass(approx, CANTOR_ALPHA, a, b) == pytest.approx(S(b) - S(a), abs=1e-12)

    def test_on_support(self):
        approx = build_set(CANTOR, 2)
        assert on_support(approx, [0.0, 1 / 9, 0.15, 0.5, 2 / 3, 1.0]).tolist() == [True, True, False, False, True, True]

    def test_wrong_alpha(self):
        with pytest.raises(DomainError):
            staircase_of_set(build_set(CANTOR, 3), 1.2)


class TestCurve:
    def test_vertex_count(self):
        curve = build_curve(VON_KOCH, 3)
        assert len(curve.vertices) == 4**3 + 1
        np.testing.assert_allclose(curve.vertices[-1], [1.0, 0.0], atol=1e-14)

    def test_negative_generation(self):
        with pytest.raises(DomainError):
            build_curve(VON_KOCH, -2)

    @pytest.mark.parametrize("gen", [1, 5, 8])
    def test_total(self, gen):
        J = rise_function(build_curve(VON_KOCH, gen), KOCH_ALPHA)
        assert J.total == pytest.approx(INV_GAMMA_KOCH, rel=1e-12)

    def test_mirror_symmetry(self):
        J = rise_function(build_curve(VON_KOCH, 5), KOCH_ALPHA)
        t = np.linspace(0, 1, 57)
        np.testing.assert_allclose(J(1 - t), J.total - J(t), atol=1e-13)

    def test_three_dimensional_generator(self):
        spec = CurveGeneratorSpec([[0, 0, 0], [1 / 3, 0, 0], [0.5, 0, math.sqrt(3) / 6], [2 / 3, 0, 0], [1, 0, 0]])
        flat = build_curve(VON_KOCH, 4)
        tall = build_curve(spec, 4)
        # same curve rotated out of the plane: identical segment lengths
        np.testing.assert_allclose(
            np.linalg.norm(tall.segments, axis=1), np.linalg.norm(flat.segments, axis=1), rtol=1e-12
        )

    def test_reach(self):
        curve = build_curve(VON_KOCH, 4)
        assert euclidean_reach(curve, 1.0) == pytest.approx(1.0)
        assert euclidean_reach(curve, 0.5) == pytest.approx(math.hypot(0.5, math.sqrt(3) / 6))
        with pytest.raises(DomainError):
            euclidean_reach(curve, 1.5)

    @pytest.mark.parametrize("alpha", [0.9, 2.5])
    def test_alpha_range(self, alpha):
        with pytest.raises(DomainError):
            rise_function(build_curve(VON_KOCH, 2), alpha)


class TestDimension:
    def test_set(self):
        est = estimate_dimension(build_set(CANTOR, 6))
        assert est.estimate == pytest.approx(CANTOR_ALPHA, abs=1e-6)
        assert est.similarity == pytest.approx(CANTOR_ALPHA)

    def test_curve(self):
        est = estimate_dimension(build_curve(VON_KOCH, 4))
        assert est.estimate == pytest.approx(KOCH_ALPHA, abs=1e-6)

    def test_depth_zero(self):
        assert estimate_dimension(build_set(CANTOR, 0)).estimate == 1.0

    def test_wrong_type(self):
        with pytest.raises(TypeError):
            estimate_dimension([0.0, 1.0])

    @given(st.floats(0.05, 0.45), st.floats(0.05, 0.45))
    def test_unequal_ratios(self, r1, r2):
        spec = IfsSetSpec(((r1, 0.0), (r2, 1 - r2)))
        est = estimate_dimension(build_set(spec, 3))
        sim = similarity_dimension([r1, r2])
        assert est.similarity == pytest.approx(sim)
        assert est.estimate == pytest.approx(sim, abs=1e-5)


class TestStaircase:
    def test_validation(self):
        with pytest.raises(DomainError):
            Staircase([0.0, 0.0, 1.0], [0.0, 1.0, 2.0])
        with pytest.raises(DomainError):
            Staircase([0.0, 1.0], [1.0, 0.0])
        with pytest.raises(DomainError):
            Staircase([0.0], [0.0])

    def test_constant_outside(self):
        S = Staircase([0.0, 1.0], [0.0, 2.0])
        assert S(-1.0) == 0.0 and S(3.0) == 2.0 and S(0.25) == 0.5

    def test_frozen(self):
        S = Staircase([0.0, 1.0], [0.0, 2.0])
        with pytest.raises(ValueError):
            S.values[0] = 1.0

    def test_csv(self, tmp_path):
        S = staircase_of_set(build_set(CANTOR, 2), CANTOR_ALPHA)
        path = tmp_path / "s.csv"
        write_staircase_csv(S, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "z,S"
        data = np.loadtxt(path, delimiter=",", skiprows=1)
        np.testing.assert_array_equal(data[:, 1], S.values)

    @given(st.lists(st.floats(0, 1), min_size=2, max_size=30))
    def test_monotone(self, zs):
        S = staircase_of_set(build_set(CANTOR, 5), CANTOR_ALPHA)
        z = np.sort(zs)
        assert np.all(np.diff(S(z)) >= 0)
