import numpy as np
import pytest

from phonprosody import synth
from phonprosody.signal_io import AudioBuffer


def tone(freq, seconds=1.0, sr=24000, amp=0.5):
    t = np.arange(int(seconds * sr)) / sr
    return AudioBuffer(amp * np.sin(2 * np.pi * freq * t), sr)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def feature_corpus():
    return synth.feature_corpus(n_utts=25, seed=3)


@pytest.fixture(scope="session")
def audio_corpus(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    manifest = synth.write_corpus(root, n_utts=12, seed=5)
    unseen = synth.write_corpus(
        root, speakers=[synth.SyntheticSpeaker("unseen_m", 118.0, 2.6, 1.0)],
        n_utts=10, seed=6, manifest_name="unseen.csv")
    return root, manifest, unseen


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        title, ok, detail = results[n]
        terminalreporter.write_line(f"[criterion {n:2d}] {'PASS' if ok else 'FAIL'}  {title}  {detail}")
