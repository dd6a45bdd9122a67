import pytest

from gateway_shield.traffic import Label, PacketRecord

MS = 1_000_000
S = 1_000_000_000


def make_trace(arrivals, labels=None):
    labels = labels or [Label.BENIGN] * len(arrivals)
    return [PacketRecord(int(t), lab, 0, i) for i, (t, lab) in enumerate(zip(arrivals, labels))]


def labelled(pattern):
    """Trace with 1 ns spacing from a string like 'AAAB' (A=attack, B=benign)."""
    return make_trace(range(len(pattern)), [Label.ATTACK if c == "A" else Label.BENIGN for c in pattern])


@pytest.fixture
def perfect():
    from gateway_shield.detector import DetectorConfig
    return lambda w, tau=3 * MS: DetectorConfig(tpr=1.0, tnr=1.0, tau_inspect=tau, window_w=w)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod and getattr(mod, "RESULTS", None):
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
