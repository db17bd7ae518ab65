import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selftrap import MovingPacket
from selftrap.errors import ParameterError
from selftrap.profile import ProfileParams, solve_profile, sweep_temperature
from selftrap.serialize import (
    PROFILE_HEADER,
    SNAPSHOT_HEADER,
    SWEEP_HEADER,
    dumps_stable,
    fields_csv,
    format_float,
    loads_stable,
    parse_csv,
    profile_csv,
    snapshots_csv,
    sweep_csv,
)
from selftrap.zerot import amplitude_profile, box_potential, density_profile


@pytest.fixture(scope="module")
def small_profile():
    return solve_profile(ProfileParams(T=1.0, U0=1.0), n_points=129)


class TestFormatFloat:
    @given(st.floats(allow_nan=False, allow_infinity=False, width=64))
    @settings(max_examples=200, deadline=None)
    def test_round_trips_any_double(self, x):
        assert float(format_float(x)) == x

    def test_infinities(self):
        assert format_float(math.inf) == "inf"
        assert format_float(-math.inf) == "-inf"
        assert float("inf") == float(format_float(math.inf))

    def test_nan_rejected(self):
        with pytest.raises(ParameterError):
            format_float(math.nan)


class TestCsvContracts:
    def test_profile_header(self, small_profile):
        assert profile_csv(small_profile).splitlines()[0] == PROFILE_HEADER

    def test_sweep_header(self):
        records = sweep_temperature([0.5, 1.0], U0=1.0, n_points=129)
        text = sweep_csv(records)
        assert text.splitlines()[0] == SWEEP_HEADER
        assert len(text.splitlines()) == 3

    def test_snapshot_header(self, unit_limit):
        packet = MovingPacket(unit_limit, 0.0)
        grid = packet.support_grid(0.0, 65)
        psi = packet.sample(grid, 0.0)
        text = snapshots_csv([0.0], [psi])
        assert text.splitlines()[0] == SNAPSHOT_HEADER
        assert len(text.splitlines()) == 66

    def test_newline_endings_no_trailing_commas(self, small_profile):
        text = profile_csv(small_profile)
        assert "\r" not in text
        assert text.endswith("\n")
        assert not any(line.endswith(",") for line in text.splitlines())

    def test_shifted_potential_min_is_zero(self, small_profile):
        _, cols = parse_csv(profile_csv(small_profile, shift_potential=True))
        assert cols["U"].min() == 0.0

    def test_wall_sentinel_round_trip(self, unit_limit):
        grid = unit_limit.support_grid(65)
        text = fields_csv(
            grid.points,
            density_profile(unit_limit, grid),
            amplitude_profile(unit_limit, grid),
            box_potential(unit_limit, grid),
        )
        assert ",inf" in text.splitlines()[1]
        _, cols = parse_csv(text)
        assert np.isposinf(cols["U"][0]) and np.isposinf(cols["U"][-1])

    @pytest.mark.parametrize("maker", ["profile", "sweep", "box"])
    def test_parse_then_serialize_is_identity(self, maker, small_profile, unit_limit):
        if maker == "profile":
            text = profile_csv(small_profile)
        elif maker == "sweep":
            text = sweep_csv(sweep_temperature([0.5, 1.0], U0=1.0, n_points=129))
        else:
            grid = unit_limit.support_grid(65)
            text = fields_csv(
                grid.points,
                density_profile(unit_limit, grid),
                amplitude_profile(unit_limit, grid),
                box_potential(unit_limit, grid),
            )
        names, cols = parse_csv(text)
        rebuilt = "\n".join(
            [",".join(names)]
            + [
                ",".join(format_float(float(cols[n][i])) for n in names)
                for i in range(len(next(iter(cols.values()))))
            ]
        ) + "\n"
        assert rebuilt == text

    def test_malformed_csv_rejected(self):
        with pytest.raises(ParameterError):
            parse_csv("a,b\n1.0\n")


class TestStableJson:
    def test_keys_lexicographic(self):
        text = dumps_stable({"zeta": 1, "alpha": 2, "mid": {"b": 1, "a": 2}})
        assert text.index('"alpha"') < text.index('"mid"') < text.index('"zeta"')
        assert text.index('"a"') < text.index('"b"')

    def test_inf_sentinel_as_string(self):
        text = dumps_stable({"wall": math.inf, "neg": -math.inf})
        assert '"inf"' in text and '"-inf"' in text
        back = loads_stable(text)
        assert back["wall"] == math.inf and back["neg"] == -math.inf

    def test_round_trip_byte_identical(self):
        obj = {
            "b": [1.0, 0.1, 3.5e-300, math.inf],
            "a": {"nested": True, "n": None, "s": "with \"quotes\" and \n newline"},
            "count": 17,
        }
        text = dumps_stable(obj)
        assert dumps_stable(loads_stable(text)) == text

    def test_numbers_have_17_significant_digits(self):
        text = dumps_stable({"x": 1.0 / 3.0})
        assert "0.33333333333333331" in text

    def test_valid_json(self):
        import json

        obj = {"values": [1.0, 2.5], "flag": False, "name": "run"}
        assert json.loads(dumps_stable(obj)) == obj

    def test_unsupported_type_rejected(self):
        with pytest.raises(ParameterError):
            dumps_stable({"bad": object()})
