import pytest

from layersim.core import Deterministic, RandomStream, UniformInt
from layersim.errors import InvalidSpec, MalformedTrace, NonMonotonicTimestamps
from layersim.workload import (
    Arrival,
    ClosedLoopArrivals,
    Empirical,
    PoissonArrivals,
    RatePhase,
    TraceArrivals,
    WorkloadSpec,
    draw_length,
    gen_requests,
    load_empirical,
    replay_trace,
    write_trace,
)


def streams(seed=1):
    return {name: RandomStream(seed, name) for name in ("arrivals", "input_lens", "output_lens")}


class TestPoisson:
    def test_mean_interarrival_matches_rate(self):
        # exponential inter-arrival with rate 10 has mean 0.1 s
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=10.0), duration=10_000.0,
                            input_len_dist=Deterministic(100),
                            output_len_dist=Deterministic(1))
        arrivals = gen_requests(spec, streams())
        assert len(arrivals) > 90_000
        gaps = [b.time - a.time for a, b in zip(arrivals, arrivals[1:])]
        mean = sum(gaps) / len(gaps)
        assert abs(mean - 0.1) / 0.1 < 0.02

    def test_deterministic_lengths(self):
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=50.0), duration=20.0,
                            input_len_dist=Deterministic(512),
                            output_len_dist=Deterministic(3))
        arrivals = gen_requests(spec, streams())
        assert arrivals and all(a.input_len == 512 and a.output_len == 3 for a in arrivals)

    def test_phase_multiplier_scales_rate(self):
        # second phase at 4x should show ~4x as many arrivals per second
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=50.0), duration=200.0,
                            phases=(RatePhase(0.0, 1.0), RatePhase(100.0, 4.0)),
                            input_len_dist=Deterministic(100),
                            output_len_dist=Deterministic(1))
        arrivals = gen_requests(spec, streams(3))
        n1 = sum(1 for a in arrivals if a.time < 100.0)
        n2 = sum(1 for a in arrivals if a.time >= 100.0)
        assert abs(n2 / n1 - 4.0) / 4.0 < 0.05

    def test_length_bounds_respected(self):
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=100.0), duration=50.0,
                            input_len_dist=UniformInt(50, 2048),
                            output_len_dist=UniformInt(32, 512))
        arrivals = gen_requests(spec, streams(8))
        assert all(50 <= a.input_len <= 2048 for a in arrivals)
        assert all(32 <= a.output_len <= 512 for a in arrivals)

    def test_reproducible_for_same_seed(self):
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=20.0), duration=100.0)
        assert gen_requests(spec, streams(5)) == gen_requests(spec, streams(5))
        assert gen_requests(spec, streams(5)) != gen_requests(spec, streams(6))

    def test_arrivals_within_duration_and_increasing(self):
        spec = WorkloadSpec(arrival=PoissonArrivals(rate=30.0), duration=60.0)
        arrivals = gen_requests(spec, streams(2))
        times = [a.time for a in arrivals]
        assert times == sorted(times)
        assert all(0 <= t < 60.0 for t in times)


class TestValidation:
    def test_zero_rate_rejected(self):
        with pytest.raises(InvalidSpec):
            WorkloadSpec(arrival=PoissonArrivals(rate=0.0)).validate()

    def test_zero_concurrency_rejected(self):
        with pytest.raises(InvalidSpec):
            WorkloadSpec(arrival=ClosedLoopArrivals(concurrency=0)).validate()

    def test_phase_ordering_enforced(self):
        with pytest.raises(InvalidSpec):
            WorkloadSpec(arrival=PoissonArrivals(10.0),
                         phases=(RatePhase(0.0, 1.0), RatePhase(0.0, 2.0))).validate()

    def test_bad_length_dist(self):
        with pytest.raises(InvalidSpec):
            WorkloadSpec(arrival=PoissonArrivals(10.0),
                         input_len_dist=UniformInt(0, 10)).validate()


class TestTrace:
    def test_replay_exact(self, tmp_path):
        path = tmp_path / "trace.csv"
        rows = [Arrival(0.5, 100, 4), Arrival(1.25, 200, 8), Arrival(1.25, 50, 2)]
        write_trace(path, rows)
        assert replay_trace(path) == rows
        spec = WorkloadSpec(arrival=TraceArrivals(str(path)), duration=10.0)
        assert gen_requests(spec, streams()) == rows

    def test_out_of_order_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("arrival_time_s,input_tokens,output_tokens\n2.0,10,1\n1.0,10,1\n")
        with pytest.raises(NonMonotonicTimestamps):
            replay_trace(path)

    def test_empty_trace_is_valid(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("arrival_time_s,input_tokens,output_tokens\n")
        assert replay_trace(path) == []

    def test_malformed_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("arrival_time_s,input_tokens,output_tokens\n1.0,ten,1\n")
        with pytest.raises(MalformedTrace):
            replay_trace(path)
        path.write_text("wrong,header\n")
        with pytest.raises(MalformedTrace):
            replay_trace(path)
        with pytest.raises(MalformedTrace):
            replay_trace(tmp_path / "missing.csv")


class TestEmpirical:
    def test_load_and_draw(self, tmp_path):
        path = tmp_path / "lens.txt"
        path.write_text("100\n200\n300\n")
        dist = load_empirical(path)
        assert dist == Empirical((100, 200, 300))
        stream = RandomStream(1, "input_lens")
        samples = {draw_length(dist, stream) for _ in range(200)}
        assert samples == {100, 200, 300}

    def test_bad_file(self, tmp_path):
        path = tmp_path / "lens.txt"
        path.write_text("abc\n")
        with pytest.raises(InvalidSpec):
            load_empirical(path)
        path.write_text("")
        with pytest.raises(InvalidSpec):
            load_empirical(path)
