import numpy as np
import pytest

from phonprosody.alignment import (PAUSE, PHONE, PUNCTUATION, WORD_BOUNDARY, AlignmentError,
                                   PhonemeSegment, aggregate_phoneme_f0, extract_durations,
                                   parse_alignment, phoneme_prosody, validate_segments,
                                   write_alignment)
from phonprosody.pitch import LOG_HZ, PitchTrack


def write(tmp_path, text, name="a.tsv"):
    path = tmp_path / name
    path.write_text(text)
    return path


def log_track(values, hop=0.01, t0=0.005):
    values = np.asarray(values, dtype=float)
    return PitchTrack(values, np.ones(len(values), bool), hop, LOG_HZ, t0=t0,
                      duration=t0 + hop * (len(values) - 0.5))


def test_parse_single_line(tmp_path):
    segs = parse_alignment(write(tmp_path, "0.00\t0.12\tAH\tphone\n"))
    assert segs == [PhonemeSegment(0.0, 0.12, "AH", PHONE)]


def test_parse_comments_blank_and_sorting(tmp_path):
    text = "# header\n0.2\t0.3\tB\tphone\n\n0.0\t0.1\tA\tphone\n0.1\t0.2\t#\tword_boundary\n"
    segs = parse_alignment(write(tmp_path, text))
    assert [s.label for s in segs] == ["A", "#", "B"]


def test_parse_empty_file(tmp_path):
    assert parse_alignment(write(tmp_path, "")) == []


@pytest.mark.parametrize("text", [
    "0.0\t0.1\tA\tphone\n0.05\t0.2\tB\tphone\n",  # overlap
    "0.0\t0.1\tA\n",  # field count
    "0.0\tx\tA\tphone\n",  # bad number
    "0.2\t0.1\tA\tphone\n",  # end before start
    "0.1\t0.1\tA\tphone\n",  # zero length
    "0.0\t0.1\tA\tvowel\n",  # unknown kind
])
def test_parse_errors(tmp_path, text):
    with pytest.raises(AlignmentError):
        parse_alignment(write(tmp_path, text))


def test_write_round_trip(tmp_path):
    segs = [PhonemeSegment(0.0, 0.1, "A"), PhonemeSegment(0.1, 0.15, "sp", PAUSE),
            PhonemeSegment(0.15, 0.3, "B")]
    write_alignment(tmp_path / "r.tsv", segs)
    assert parse_alignment(tmp_path / "r.tsv") == segs


def test_aggregate_constant():
    segs = [PhonemeSegment(0.0, 0.2, "A")]
    np.testing.assert_allclose(aggregate_phoneme_f0(log_track([4.0] * 20), segs), [4.0])


def test_aggregate_two_frames():
    # frame centers at 0.005, 0.015, 0.025, 0.035
    segs = [PhonemeSegment(0.01, 0.03, "A")]
    tr = log_track([1.0, 4.0, 5.0, 9.0])
    np.testing.assert_allclose(aggregate_phoneme_f0(tr, segs), [4.5])


def test_aggregate_nearest_fallback():
    # 2 ms phone between the centers at 0.015 and 0.025, midpoint 0.0215
    segs = [PhonemeSegment(0.0205, 0.0225, "A")]
    tr = log_track([1.0, 4.0, 5.0, 9.0])
    np.testing.assert_allclose(aggregate_phoneme_f0(tr, segs), [5.0])


def test_aggregate_skips_non_phones_and_checks_coverage():
    segs = [PhonemeSegment(0.0, 0.02, "A"), PhonemeSegment(0.02, 0.03, "sp", PAUSE),
            PhonemeSegment(0.03, 0.04, "B")]
    assert aggregate_phoneme_f0(log_track([1, 2, 3, 4]), segs).shape == (2,)
    with pytest.raises(AlignmentError):
        aggregate_phoneme_f0(log_track([1, 2]), segs)


def test_aggregate_requires_log_domain():
    tr = PitchTrack(np.array([100.0]), np.array([True]), 0.01)
    with pytest.raises(ValueError):
        aggregate_phoneme_f0(tr, [PhonemeSegment(0.0, 0.01, "A")])


def test_durations():
    segs = [PhonemeSegment(0, 0.1, "A"), PhonemeSegment(0.1, 0.25, "B")]
    np.testing.assert_allclose(extract_durations(segs), [0.1, 0.15])
    assert extract_durations([PhonemeSegment(0, 0.1, "sil", PAUSE)]).size == 0
    mixed = [PhonemeSegment(0, 0.1, "A"), PhonemeSegment(0.1, 0.2, "sp", PAUSE),
             PhonemeSegment(0.2, 0.3, "B")]
    assert len(extract_durations(mixed)) == 2


def test_record_count_excludes_boundaries():
    segs = [PhonemeSegment(0.0, 0.05, "A"), PhonemeSegment(0.05, 0.07, "#", WORD_BOUNDARY),
            PhonemeSegment(0.07, 0.12, "B"), PhonemeSegment(0.12, 0.14, ".", PUNCTUATION)]
    records = phoneme_prosody(log_track(np.linspace(4, 5, 15)), segs)
    assert len(records) == 2 < len(segs)
    assert all(r.duration > 0 and np.isfinite(r.mean_log_f0) for r in records)


def test_permutation_stability(rng):
    segs = [PhonemeSegment(i * 0.05, (i + 1) * 0.05, f"P{i}") for i in range(8)]
    tr = log_track(rng.uniform(4, 5, 45))
    ref = aggregate_phoneme_f0(tr, validate_segments(segs))
    shuffled = [segs[i] for i in rng.permutation(len(segs))]
    np.testing.assert_array_equal(aggregate_phoneme_f0(tr, validate_segments(shuffled)), ref)
