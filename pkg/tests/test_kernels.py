import numpy as np
import pytest

from podvs.errors import ConfigError
from podvs.kernels import THETAS, build_banks, load_banks, save_banks


@pytest.fixture(params=[5, 11], ids=["5x5", "11x11"])
def banks(request):
    return build_banks(request.param)


def rot180(k):
    return k[::-1, ::-1]


class TestEdgeBank:
    def test_even_symmetric_under_rotation(self, banks):
        for even in banks.edge.even:
            np.testing.assert_array_equal(even, rot180(even))

    def test_odd_antisymmetric(self, banks):
        for odd in banks.edge.odd:
            np.testing.assert_array_equal(odd, -rot180(odd))

    def test_odd_zero_dc(self, banks):
        for odd in banks.edge.odd:
            assert abs(odd.sum()) < 1e-15

    def test_even_zero_dc(self, banks):
        for even in banks.edge.even:
            assert abs(even.sum()) < 1e-12

    def test_unit_l2_norm(self, banks):
        for kern in (*banks.edge.even, *banks.edge.odd):
            assert np.sum(kern**2) == pytest.approx(1.0, abs=1e-12)

    def test_four_orientations(self, banks):
        assert len(banks.edge.even) == len(banks.edge.odd) == len(THETAS) == 4


class TestCenterSurround:
    def test_zero_dc(self, banks):
        assert abs(banks.cs.on.sum()) < 1e-12

    def test_excitatory_center(self, banks):
        c = banks.size // 2
        assert banks.cs.on[c, c] > 0

    def test_inhibitory_surround(self, banks):
        assert banks.cs.on[0, 0] < 0


class TestVonMises:
    def test_right_is_rotated_left(self, banks):
        for left, right in zip(banks.vm.left, banks.vm.right):
            np.testing.assert_array_equal(right, rot180(left))

    def test_nonnegative_unit_mass(self, banks):
        for kern in (*banks.vm.left, *banks.vm.right):
            assert np.all(kern >= 0)
            assert kern.sum() == pytest.approx(1.0, abs=1e-12)

    def test_annular_center_suppressed(self, banks):
        c = banks.size // 2
        for kern in banks.vm.left:
            assert kern[c, c] < kern.max() / 10

    def test_side_direction(self):
        # theta = pi/2 (vertical border): the right-side kernel points
        # along +x, so its mass sits in the dx > 0 half
        banks = build_banks(5)
        ti = THETAS.index(np.pi / 2)
        right = banks.vm.right[ti]
        assert right[:, 3:].sum() > right[:, :2].sum()
        left = banks.vm.left[ti]
        assert left[:, :2].sum() > left[:, 3:].sum()


class TestBankIO:
    def test_round_trip_bit_exact(self, banks, tmp_path):
        path = tmp_path / "banks.txt"
        save_banks(banks, path)
        loaded = load_banks(path)
        for a, b in zip(banks.edge.even, loaded.edge.even):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(banks.edge.odd, loaded.edge.odd):
            np.testing.assert_array_equal(a, b)
        np.testing.assert_array_equal(banks.cs.on, loaded.cs.on)
        for a, b in zip(banks.vm.left, loaded.vm.left):
            np.testing.assert_array_equal(a, b)
        for a, b in zip(banks.vm.right, loaded.vm.right):
            np.testing.assert_array_equal(a, b)

    def test_rejects_even_size(self):
        with pytest.raises(ConfigError):
            build_banks(6)

    def test_rejects_garbage_file(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not a bank\n")
        from podvs.errors import FormatError

        with pytest.raises(FormatError):
            load_banks(path)
