import math

import numpy as np
import pytest

from jtm.errors import NonFiniteError, ShapeError, SyntaxInputError
from jtm.skeleton import (
    Part,
    SequenceFormat,
    SkeletonSequence,
    kinect_v1_partition,
    parse_sequence,
    repair_missing,
    uniform_partition,
    validate,
    validate_raw_frames,
    write_sequence,
)


def random_sequence(n=3, m=20, seed=0):
    rng = np.random.default_rng(seed)
    return SkeletonSequence(rng.normal(size=(n, m, 3)), source_id="rand")


class TestParsing:
    def test_plain_xyz_two_frames_one_joint(self):
        seq = parse_sequence("0 0 1\n0 1 1\n", SequenceFormat.PLAIN_XYZ)
        assert seq.frame_count == 2
        assert seq.joint_count == 1
        assert np.array_equal(seq.data[1, 0], [0, 1, 1])

    def test_wrong_joint_count_is_shape_error(self):
        good = " ".join(["0 0 0"] * 20)
        bad = " ".join(["0 0 0"] * 19)
        with pytest.raises(ShapeError):
            parse_sequence(good + "\n" + bad + "\n", SequenceFormat.PLAIN_XYZ, m=20)

    def test_nan_rejected(self):
        with pytest.raises(NonFiniteError):
            parse_sequence("0 nan 1\n", SequenceFormat.PLAIN_XYZ)

    def test_garbage_is_syntax_error(self):
        with pytest.raises(SyntaxInputError):
            parse_sequence("0 zero 1\n", SequenceFormat.PLAIN_XYZ)
        with pytest.raises(SyntaxInputError):
            parse_sequence("not json\n", SequenceFormat.CANONICAL_JSON)

    def test_jsonl_missing_header_field(self):
        with pytest.raises(SyntaxInputError):
            parse_sequence('{"joints": []}\n', SequenceFormat.CANONICAL_JSON)


class TestRoundTrip:
    def test_jsonl_roundtrip_random_sequence(self):
        seq = random_sequence()
        again = parse_sequence(write_sequence(seq))
        assert again.data.shape == seq.data.shape
        assert np.array_equal(again.data, seq.data)
        assert again.source_id == seq.source_id

    def test_write_parse_write_idempotent(self):
        seq = random_sequence(seed=5)
        text1 = write_sequence(seq)
        text2 = write_sequence(parse_sequence(text1))
        assert text1 == text2

    def test_tenth_survives_exactly(self):
        seq = SkeletonSequence(np.array([[[0.1, 0.2, 0.3]], [[0.4, 0.5, 0.1]]]))
        for fmt in SequenceFormat:
            again = parse_sequence(write_sequence(seq, fmt), fmt)
            assert np.array_equal(again.data, seq.data)

    def test_empty_frame_sequence(self):
        seq = SkeletonSequence(np.zeros((1, 0, 3)))
        again = parse_sequence(write_sequence(seq))
        assert again.frame_count == 1
        assert again.joint_count == 0

    def test_xyz_roundtrip(self):
        seq = random_sequence(n=4, m=3)
        text = write_sequence(seq, SequenceFormat.PLAIN_XYZ)
        again = parse_sequence(text, SequenceFormat.PLAIN_XYZ, m=3)
        assert np.array_equal(again.data, seq.data)


class TestValidate:
    def test_well_formed_sequence(self):
        assert validate(random_sequence()) == []

    def test_nonfinite_located(self):
        data = np.zeros((2, 5, 3))
        data[0, 3, 1] = np.nan
        v = validate(SkeletonSequence(data))
        assert len(v) == 1
        assert (v[0].kind, v[0].frame, v[0].joint) == ("NONFINITE", 0, 3)

    def test_validate_is_pure(self):
        seq = random_sequence()
        assert validate(seq) == validate(seq)

    def test_ragged_raw_frames(self):
        frames = [[[0, 0, 0], [1, 1, 1]], [[0, 0, 0]]]
        v = validate_raw_frames(frames, m=2)
        assert [x.kind for x in v] == ["SHAPE"]
        assert v[0].frame == 1


class TestPartition:
    def test_kinect_partition_total_and_balanced(self):
        part = kinect_v1_partition()
        assert part.covers(20)
        counts = {p: 0 for p in Part}
        for j in range(20):
            counts[part.part(j)] += 1
        assert counts[Part.LEFT] == 8
        assert counts[Part.RIGHT] == 8
        assert counts[Part.MIDDLE] == 4

    def test_uniform_partition(self):
        part = uniform_partition(7)
        assert part.covers(7)
        assert all(part.part(j) is Part.LEFT for j in range(7))


class TestRepair:
    def test_interpolates_gap(self):
        data = np.zeros((3, 1, 3))
        data[0, 0] = (0.0, 0.0, 0.0)
        data[1, 0] = (np.nan, np.nan, np.nan)
        data[2, 0] = (2.0, 4.0, 6.0)
        fixed = repair_missing(SkeletonSequence(data))
        assert np.allclose(fixed.data[1, 0], (1.0, 2.0, 3.0))
        assert validate(fixed) == []
