import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from goldfish.errors import MalformedTimestamp
from goldfish.subtitles import (
    SubtitleCue,
    SubtitleTrack,
    parse_subtitles,
    serialize_track,
)

ONE_CUE_SRT = "1\n00:00:00,000 --> 00:00:02,000\nhello\n"

TWO_CUE_SRT = """1
00:00:01,000 --> 00:00:04,000
first line

2
00:00:02,500 --> 00:00:05,000
second line
"""

VTT = """WEBVTT

00:00:00.000 --> 00:00:02.000
hello vtt

cue-two
00:00:03.500 --> 00:00:04.250
<i>styled</i> text
"""


def test_single_srt_cue():
    track = parse_subtitles(ONE_CUE_SRT, "srt")
    assert len(track) == 1
    cue = track.cues[0]
    assert (cue.start_ms, cue.end_ms, cue.text) == (0, 2000, "hello")


def test_overlapping_cues_both_retained_in_order():
    track = parse_subtitles(TWO_CUE_SRT, "srt")
    assert [c.text for c in track.cues] == ["first line", "second line"]
    assert track.cues[0].start_ms == 1000
    assert track.cues[1].start_ms == 2500


def test_malformed_timestamp():
    bad = "1\n00:00:0X,000 --> 00:00:02,000\nhello\n"
    with pytest.raises(MalformedTimestamp):
        parse_subtitles(bad, "srt")


def test_empty_input_is_not_an_error():
    assert parse_subtitles("", "srt").cues == ()
    assert parse_subtitles("WEBVTT\n", "vtt").cues == ()


def test_vtt_parsing_strips_tags_and_skips_header():
    track = parse_subtitles(VTT, "vtt")
    assert [c.text for c in track.cues] == ["hello vtt", "styled text"]
    assert track.cues[1].start_ms == 3500
    assert track.cues[1].end_ms == 4250


def test_vtt_without_hours():
    track = parse_subtitles("WEBVTT\n\n00:05.000 --> 00:06.500\nshort\n", "vtt")
    assert track.cues[0].start_ms == 5000
    assert track.cues[0].end_ms == 6500


def test_whitespace_normalized_and_multiline_joined():
    raw = "1\n00:00:00,000 --> 00:00:02,000\n  spaced   <b>bold</b>\nsecond row \n"
    track = parse_subtitles(raw, "srt")
    assert track.cues[0].text == "spaced bold second row"


def test_degenerate_and_empty_cues_dropped():
    raw = (
        "1\n00:00:05,000 --> 00:00:05,000\nzero span\n\n"
        "2\n00:00:06,000 --> 00:00:07,000\n<b></b>\n\n"
        "3\n00:00:08,000 --> 00:00:09,000\nkept\n"
    )
    track = parse_subtitles(raw, "srt")
    assert [c.text for c in track.cues] == ["kept"]


def test_cues_sorted_by_start_with_reindex():
    raw = (
        "1\n00:00:10,000 --> 00:00:12,000\nlate\n\n"
        "2\n00:00:01,000 --> 00:00:03,000\nearly\n"
    )
    track = parse_subtitles(raw, "srt")
    assert [c.text for c in track.cues] == ["early", "late"]
    assert [c.index for c in track.cues] == [0, 1]


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        parse_subtitles(ONE_CUE_SRT, "ass")


@pytest.mark.parametrize("fmt", ["srt", "vtt"])
def test_serialize_then_parse_is_fixed_point(fmt):
    track = parse_subtitles(TWO_CUE_SRT, "srt")
    once = parse_subtitles(serialize_track(track, fmt), fmt)
    assert once == track
    twice = parse_subtitles(serialize_track(once, fmt), fmt)
    assert twice == once


_texts = st.text(
    alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Nd"), max_codepoint=0x17F),
    min_size=1,
    max_size=20,
).filter(lambda t: t.strip())


@settings(max_examples=60, deadline=None)
@given(
    st.lists(
        st.tuples(st.integers(0, 3_600_000), st.integers(1, 60_000), _texts),
        min_size=0,
        max_size=12,
    ),
    st.sampled_from(["srt", "vtt"]),
)
def test_roundtrip_property(cue_specs, fmt):
    """parse(serialize(track)) == track for arbitrary well-formed tracks."""
    cues = sorted(
        (start, start + span, text) for start, span, text in cue_specs
    )
    track = SubtitleTrack(
        cues=tuple(
            SubtitleCue(index=i, start_ms=s, end_ms=e, text=" ".join(t.split()))
            for i, (s, e, t) in enumerate(cues)
        )
    )
    assert parse_subtitles(serialize_track(track, fmt), fmt) == track
