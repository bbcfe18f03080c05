import math

import numpy as np
import pytest

from nfkit.analysis import (
    characteristic_volume,
    communication_modes,
    continuous_power_scaling,
    dof_bound_continuous,
    dof_bound_discrete,
    effective_dof,
    integer_dof,
    power_scaling_curve,
    received_power_mrt,
    write_dof_csv,
    write_scaling_csv,
)
from nfkit.channel import farfield_channel, greens_operator, nusw_channel, nusw_mimo_channel
from nfkit.errors import DegenerateChannelError, InvalidArgumentError
from nfkit.geometry import (
    SPEED_OF_LIGHT,
    ApertureSurface,
    ArrayGeometry,
    Carrier,
    make_uniform_linear_array,
    polar_to_cartesian,
)

C3 = Carrier(3e9)
C28 = Carrier(28e9)


def test_received_power_mrt():
    lam = C3.wavelength
    one = make_uniform_linear_array(1, spacing=0.05)
    d = 12.0
    p = received_power_mrt(nusw_channel(one, np.array([d, 0, 0]), C3), transmit_power_w=2.0)
    assert p == pytest.approx(2.0 * (lam / (4 * math.pi * d)) ** 2, rel=1e-12)

    two = make_uniform_linear_array(2, carrier=C3)
    p2 = received_power_mrt(nusw_channel(two, polar_to_cartesian(d, math.pi / 2), C3))
    p1 = (lam / (4 * math.pi * np.linalg.norm(two.elements[0] - polar_to_cartesian(d, math.pi / 2)))) ** 2
    assert p2 == pytest.approx(2 * p1, rel=1e-12)

    # brute-force sum oracle, Fig. 2 scenario geometry
    arr = make_uniform_linear_array(128, carrier=C3)
    point = polar_to_cartesian(20.0, math.pi / 2)
    dists = np.linalg.norm(arr.elements - point, axis=1)
    oracle = np.sum((lam / (4 * np.pi * dists)) ** 2)
    assert received_power_mrt(nusw_channel(arr, point, C3)) == pytest.approx(oracle, rel=1e-12)


def test_power_scaling_far_and_near():
    far = power_scaling_curve(polar_to_cartesian(500.0, math.pi / 2), C28, [2, 4, 8, 16, 32, 64])
    ratios = far.received_power_w[1:] / far.received_power_w[:-1]
    assert np.all(ratios >= 1.98) and np.all(ratios <= 2.02)

    near = power_scaling_curve(
        polar_to_cartesian(1.0, math.pi / 2), C28, [2**k for k in range(1, 14)]
    )
    assert np.all(np.diff(near.received_power_w) > 0)  # monotone growth
    per_element = np.diff(near.received_power_w) / np.diff(near.sizes)
    assert np.all(np.diff(per_element) < 0)  # marginal gain per added element shrinks

    with pytest.raises(InvalidArgumentError):
        power_scaling_curve(polar_to_cartesian(1.0, math.pi / 2), C28, [4, 2])
    with pytest.raises(InvalidArgumentError):
        power_scaling_curve(polar_to_cartesian(1.0, math.pi / 2), C28, [2, 3])  # parity


def test_far_field_linearity():
    # D < 0.05 d throughout: P vs N is linear with R^2 > 0.999
    curve = power_scaling_curve(polar_to_cartesian(500.0, math.pi / 2), C28, [2, 4, 8, 16, 32])
    n = curve.sizes
    p = curve.received_power_w
    slope, intercept = np.polyfit(n, p, 1)
    resid = p - (slope * n + intercept)
    r2 = 1 - np.sum(resid**2) / np.sum((p - p.mean()) ** 2)
    assert r2 > 0.999


def test_characteristic_volume():
    c = Carrier(SPEED_OF_LIGHT / 0.01)
    cv = characteristic_volume(10.0, c)
    assert cv.side_m == pytest.approx(math.sqrt(0.05), rel=1e-12)
    assert cv.volume_m3 == pytest.approx(math.sqrt(0.05) ** 3, rel=1e-12)
    assert characteristic_volume(20.0, c).volume_m3 == pytest.approx(
        cv.volume_m3 * 2**1.5, rel=1e-12
    )
    assert characteristic_volume(1e-9, c).volume_m3 < 1e-15
    with pytest.raises(InvalidArgumentError):
        characteristic_volume(0.0, c)


def test_continuous_power_scaling_characteristic():
    # one characteristic-volume transmitter reproduces Friis within 5%
    c = Carrier(SPEED_OF_LIGHT / 0.01)
    d = 10.0
    receiver = np.array([d, 0.0, 0.0])
    side = characteristic_volume(d, c).side_m
    curve = continuous_power_scaling(receiver, c, [side], normalization="characteristic")
    friis = (c.wavelength / (4 * math.pi * d)) ** 2
    assert curve.received_power_w[0] == pytest.approx(friis, rel=0.05)


def test_continuous_power_scaling_halfwave_matches_discrete():
    # quadrature with half-wave cells recovers the discrete-array sum
    c = C28
    d = 5.0
    receiver = np.array([d, 0.0, 0.0])
    n_side = 16
    side = n_side * c.wavelength / 2
    curve = continuous_power_scaling(
        receiver, c, [side], normalization="halfwave", patches_per_side=n_side
    )
    lam = c.wavelength
    ys = (np.arange(n_side) - (n_side - 1) / 2) * lam / 2
    yy, zz = np.meshgrid(ys, ys)
    dists = np.sqrt(d**2 + yy**2 + zz**2)
    discrete = np.sum((lam / (4 * np.pi * dists)) ** 2)
    assert curve.received_power_w[0] == pytest.approx(discrete, rel=0.02)


def test_continuous_power_scaling_validation():
    receiver = np.array([5.0, 0.0, 0.0])
    with pytest.raises(InvalidArgumentError):
        continuous_power_scaling(receiver, C28, [1.0, 0.5])
    with pytest.raises(InvalidArgumentError):
        continuous_power_scaling(receiver, C28, [1.0], normalization="bogus")


def test_effective_dof():
    arr = make_uniform_linear_array(8, carrier=C3)
    a_tx = farfield_channel(arr, math.radians(40), C3).vector
    a_rx = farfield_channel(arr, math.radians(75), C3).vector
    rank1 = np.outer(a_rx, a_tx)
    from nfkit.channel import ChannelMatrix, MODEL_FARFIELD

    report = effective_dof(ChannelMatrix(entries=rank1, carrier=C3, model=MODEL_FARFIELD))
    assert report.empirical_dof == 1

    # 16-element ULAs with 1 m apertures at lambda=0.05, d=5: bound is 16
    c = Carrier(SPEED_OF_LIGHT / 0.05)
    spacing = 1.0 / 15
    tx = make_uniform_linear_array(16, spacing=spacing)
    rx = ArrayGeometry(elements=tx.elements + np.array([5.0, 0, 0]), spacing=spacing)
    channel = nusw_mimo_channel(tx, rx, c)
    bound = dof_bound_discrete(16, 16, 1.0, 1.0, 5.0, 0.05)
    assert bound == 16  # geometric term 3200 loses to min(N_T, N_R)
    report = effective_dof(channel, bound=bound)
    assert 1 < report.empirical_dof <= 16

    # SVD against an independent eigendecomposition of H^H H
    eigvals = np.linalg.eigvalsh(channel.entries.conj().T @ channel.entries)
    sv_from_eig = np.sqrt(np.clip(eigvals[::-1], 0, None))
    # sigma = sqrt(eig) loses precision once sigma^2 underflows the eigensolver's
    # resolution, so absolute tolerance is anchored to sigma_1
    np.testing.assert_allclose(
        report.singular_values, sv_from_eig, rtol=1e-8, atol=1e-8 * report.singular_values[0]
    )

    with pytest.raises(InvalidArgumentError):
        effective_dof(channel, threshold=0.0)


def test_dof_bounds():
    assert dof_bound_discrete(256, 256, 1.0, 1.0, 10.0, 0.01) == pytest.approx(200.0)
    assert dof_bound_discrete(1, 16, 1.0, 1.0, 5.0, 0.05) == 1.0
    assert integer_dof(0.3) == 1
    assert integer_dof(200.0) == 200

    assert dof_bound_continuous(1.0, 1.0, 10.0, 0.01, 1.0, 1.0) == pytest.approx(200.0)
    assert dof_bound_continuous(1.0, 1.0, 5.0, 0.01, 1.0, 1.0) == pytest.approx(
        4 * dof_bound_continuous(1.0, 1.0, 10.0, 0.01, 1.0, 1.0)
    )
    with pytest.raises(InvalidArgumentError):
        dof_bound_continuous(0.0, 1.0, 10.0, 0.01, 1.0, 1.0)


def test_communication_modes():
    c = Carrier(SPEED_OF_LIGHT / 0.05)

    def op_at(d, p=16):
        tx = ApertureSurface(origin=np.zeros(3), extent_y=1.0, extent_z=1.0, patches_y=p, patches_z=p)
        rx = ApertureSurface(
            origin=np.array([d, 0, 0]), extent_y=1.0, extent_z=1.0, patches_y=p, patches_z=p
        )
        return greens_operator(tx, rx, c)

    counts = [communication_modes(op_at(d)).empirical_dof for d in (2.0, 4.0, 8.0, 16.0)]
    assert np.all(np.diff(counts) <= 0)

    # two tiny patches far apart: one mode
    tx = ApertureSurface(origin=np.zeros(3), extent_y=0.02, extent_z=0.02, patches_y=1, patches_z=1)
    rx = ApertureSurface(
        origin=np.array([100.0, 0, 0]), extent_y=0.02, extent_z=0.02, patches_y=1, patches_z=1
    )
    assert communication_modes(greens_operator(tx, rx, c)).empirical_dof == 1

    # mode count stable under patch-resolution doubling once patches < lambda/4
    c2 = Carrier(SPEED_OF_LIGHT / 0.1)
    for d in (4.0,):
        tx16 = ApertureSurface(origin=np.zeros(3), extent_y=0.3, extent_z=0.3, patches_y=16, patches_z=16)
        rx16 = ApertureSurface(
            origin=np.array([d, 0, 0]), extent_y=0.3, extent_z=0.3, patches_y=16, patches_z=16
        )
        tx32 = ApertureSurface(origin=np.zeros(3), extent_y=0.3, extent_z=0.3, patches_y=32, patches_z=32)
        rx32 = ApertureSurface(
            origin=np.array([d, 0, 0]), extent_y=0.3, extent_z=0.3, patches_y=32, patches_z=32
        )
        n16 = communication_modes(greens_operator(tx16, rx16, c2)).empirical_dof
        n32 = communication_modes(greens_operator(tx32, rx32, c2)).empirical_dof
        assert n16 == n32

    # model-tag check
    arr = make_uniform_linear_array(4, carrier=C3)
    ch = nusw_channel(arr, polar_to_cartesian(5.0, math.pi / 2), C3)
    with pytest.raises(InvalidArgumentError):
        communication_modes(ch)


def test_zero_channel_rejected():
    from nfkit.channel import ChannelMatrix, MODEL_NUSW

    zero = ChannelMatrix(entries=np.zeros((4, 1), dtype=complex), carrier=C3, model=MODEL_NUSW)
    with pytest.raises(DegenerateChannelError):
        received_power_mrt(zero)


def test_csv_writers(tmp_path):
    curve = power_scaling_curve(polar_to_cartesian(100.0, math.pi / 2), C28, [2, 4, 8])
    p = tmp_path / "curve.csv"
    write_scaling_csv(curve, p)
    lines = p.read_text().strip().split("\n")
    assert lines[0] == "size,received_power_w,model"
    assert len(lines) == 4

    arr = make_uniform_linear_array(8, carrier=C3)
    rx = ArrayGeometry(elements=arr.elements + np.array([50.0, 0, 0]), spacing=arr.spacing)
    report = effective_dof(nusw_mimo_channel(arr, rx, C3))
    p2 = tmp_path / "dof.csv"
    write_dof_csv(report, p2)
    lines = p2.read_text().strip().split("\n")
    assert lines[0] == "index,sigma"
    assert len(lines) == 9
