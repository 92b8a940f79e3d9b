import math

import pytest

from edgehe.ckks import make_params
from edgehe.throughput import (
    BANDWIDTH_PRESETS,
    FRAME_PRESETS,
    REPORT_VERSION,
    FrameSpec,
    InvalidFrame,
    decrypt_cycles_per_frame,
    fps_estimate,
)


@pytest.fixture(scope="module")
def p4096():
    return make_params(4096)


@pytest.fixture(scope="module")
def p16384():
    return make_params(16384)


class TestFrameSpec:
    def test_presets(self):
        qqvga = FrameSpec.qqvga()
        assert (qqvga.width, qqvga.height) == (160, 120)
        assert qqvga.frame_bits == 160 * 120 * 8
        qvga = FrameSpec.qvga()
        assert qvga.frame_bits == 4 * qqvga.frame_bits
        assert set(FRAME_PRESETS) == {"qqvga", "qvga"}

    @pytest.mark.parametrize("w,h,bpp", [(0, 120, 8), (160, -1, 8), (160, 120, 0)])
    def test_invalid_geometry(self, w, h, bpp):
        with pytest.raises(InvalidFrame):
            FrameSpec(w, h, bpp)


class TestPacking:
    def test_qqvga_4096(self, p4096):
        r = fps_estimate(FrameSpec.qqvga(), p4096)
        assert r.cts_per_frame == 3
        assert r.frame_ct_bytes_total == 270 * 1024

    def test_qvga_4096(self, p4096):
        r = fps_estimate(FrameSpec.qvga(), p4096)
        assert r.cts_per_frame == 10
        assert r.frame_ct_bytes_total == 900 * 1024

    def test_qqvga_16384_single_ct(self, p16384):
        assert fps_estimate(FrameSpec.qqvga(), p16384).cts_per_frame == 1

    def test_ct_bytes_consistent(self, p4096):
        r = fps_estimate(FrameSpec.qqvga(), p4096)
        assert r.ct_bytes * r.cts_per_frame == r.frame_ct_bytes_total


class TestFpsCeilings:
    def test_network_fps_at_900mbps(self, p16384):
        bw = BANDWIDTH_PRESETS["mid_band_5g_max"]
        qq = fps_estimate(FrameSpec.qqvga(), p16384, bandwidth_bps=bw)
        qv = fps_estimate(FrameSpec.qvga(), p16384, bandwidth_bps=bw)
        assert math.floor(qq.max_fps_network) == 70
        assert math.floor(qv.max_fps_network) == 23

    def test_binding_tag(self, p4096):
        slow_net = fps_estimate(FrameSpec.qqvga(), p4096, bandwidth_bps=1e4)
        assert slow_net.binding == "network"
        assert slow_net.max_fps == slow_net.max_fps_network
        slow_cpu = fps_estimate(FrameSpec.qqvga(), p4096, clock_hz=1e3)
        assert slow_cpu.binding == "compute"
        assert slow_cpu.max_fps == slow_cpu.max_fps_compute

    def test_bandwidth_monotone(self, p4096):
        lo = fps_estimate(FrameSpec.qqvga(), p4096, bandwidth_bps=1e8)
        hi = fps_estimate(FrameSpec.qqvga(), p4096, bandwidth_bps=9e8)
        assert hi.max_fps_network > lo.max_fps_network
        assert hi.max_fps_compute == lo.max_fps_compute

    def test_larger_degree_fewer_cts(self, p4096, p16384):
        qv = FrameSpec.qvga()
        assert fps_estimate(qv, p16384).cts_per_frame <= \
            fps_estimate(qv, p4096).cts_per_frame

    def test_meets_band_flag(self, p16384):
        r = fps_estimate(FrameSpec.qqvga(), p16384,
                         bandwidth_bps=BANDWIDTH_PRESETS["mid_band_5g_max"])
        assert r.meets_band == (r.max_fps >= 15.0)

    def test_invalid_rates(self, p4096):
        with pytest.raises(ValueError):
            fps_estimate(FrameSpec.qqvga(), p4096, clock_hz=0)
        with pytest.raises(ValueError):
            fps_estimate(FrameSpec.qqvga(), p4096, bandwidth_bps=-1)


class TestReportDict:
    def test_versioned_and_complete(self, p4096):
        d = fps_estimate(FrameSpec.qqvga(), p4096).to_dict()
        assert d["report_version"] == REPORT_VERSION
        assert d["frame"]["tag"] == "QQVGA"
        assert d["n"] == 4096
        assert d["ell"] == 3
        assert d["limb_bits"] == 30
        assert d["binding"] in ("compute", "network")
        assert d["max_fps"] == min(d["max_fps_compute"], d["max_fps_network"])


class TestDecryptCost:
    def test_scales_with_cts_and_limbs(self, p4096):
        one = decrypt_cycles_per_frame(p4096, cts=1)
        assert decrypt_cycles_per_frame(p4096, cts=3) == 3 * one
        assert decrypt_cycles_per_frame(p4096, cts=1, all_limbs=True) == \
            p4096.ell * one
