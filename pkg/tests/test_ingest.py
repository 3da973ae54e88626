import string
from datetime import datetime

import pytest
from hypothesis import given, settings, strategies as st

from junolog.errors import LabelIndexOutOfRange, MalformedTimestamp, MissingDevice
from junolog.ingest import (
    Label,
    RawLogLine,
    load_corpus,
    normalize_message,
    parse_syslog_line,
    read_label_indices,
)

LINE_REPEATED = "30-06-2018 07:00:07 AM HCM-Q12-MX5 last message repeated 19 times"
LINE_INETD = "30-06-2018 07:00:15 AM HNI-DDA-MX5 inetd[1368]: /usr/sbin/sshd[76567]: exited, status 255"


def test_parse_repeated_line():
    rec = parse_syslog_line(RawLogLine(LINE_REPEATED, 1))
    assert rec.timestamp == datetime(2018, 6, 30, 7, 0, 7)
    assert rec.device_name == "HCM-Q12-MX5"
    assert rec.message == "last message repeated 19 times"
    assert rec.raw == LINE_REPEATED


def test_parse_inetd_line():
    rec = parse_syslog_line(LINE_INETD)
    assert rec.device_name == "HNI-DDA-MX5"
    assert rec.message == "inetd[1368]: /usr/sbin/sshd[76567]: exited, status 255"


def test_pm_marker_shifts_hour():
    rec = parse_syslog_line("01-07-2018 01:02:03 PM R1 hello")
    assert rec.timestamp == datetime(2018, 7, 1, 13, 2, 3)
    assert parse_syslog_line("01-07-2018 12:00:00 AM R1 x").timestamp.hour == 0


def test_message_is_trimmed_and_may_be_empty():
    assert parse_syslog_line("01-07-2018 01:02:03 PM R1    spaced out   ").message == "spaced out"
    assert parse_syslog_line("01-07-2018 01:02:03 PM R1").message == ""


@pytest.mark.parametrize("text", [
    "garbage line with no timestamp",
    "",
    "2018-06-30 07:00:07 AM R1 iso order",
    "30-06-2018 07:00:07 R1 no marker",
    "30-06-2018 07:00:07 am R1 lowercase marker",
    "31-02-2018 07:00:07 AM R1 impossible date",
    "30-06-2018 13:00:07 PM R1 hour out of range",
    "30-06-2018 07:00:07 AMR1 glued",
])
def test_malformed_timestamp(text):
    with pytest.raises(MalformedTimestamp):
        parse_syslog_line(RawLogLine(text, 7))


def test_missing_device():
    with pytest.raises(MissingDevice) as err:
        parse_syslog_line(RawLogLine("30-06-2018 07:00:07 AM   ", 3))
    assert err.value.line_number == 3


def test_raw_line_rejects_line_breaks():
    with pytest.raises(ValueError):
        RawLogLine("a\nb", 1)


@pytest.mark.parametrize("msg, tokens", [
    ("inetd[1368]: /usr/sbin/sshd[76567]: exited, status 255",
     ["inetd", "usr", "sbin", "sshd", "exited", "status"]),
    ("", []),
    ("Last MESSAGE Repeated 19 Times", ["last", "message", "repeated", "times"]),
    ("tfeb0 MIC(0/0) link 0 SFP", ["tfeb", "mic", "link", "sfp"]),
    ("ifName ge-0/0/2.0", ["ifname", "ge"]),
    ("12345 !!! ...", []),
])
def test_normalize_examples(msg, tokens):
    assert normalize_message(msg) == tokens


def test_normalize_drops_non_ascii_letters():
    # only a-z survive; accented letters act as separators
    assert normalize_message("café olé") == ["caf", "ol"]


@given(st.text())
def test_normalize_idempotent_and_pure(s):
    toks = normalize_message(s)
    assert normalize_message(" ".join(toks)) == toks
    for t in toks:
        assert t and set(t) <= set(string.ascii_lowercase)


@settings(max_examples=200)
@given(st.lists(st.text(alphabet=string.ascii_letters + string.digits + " []:/,.-", max_size=40),
                min_size=1, max_size=5))
def test_parse_roundtrips_raw(messages):
    for i, m in enumerate(messages):
        line = f"30-06-2018 07:00:{i:02d} AM DEV-{i} {m}"
        rec = parse_syslog_line(line)
        assert rec.raw == line
        assert rec.device_name == f"DEV-{i}"
        assert rec.message == m.strip()


def _write(tmp_path, name, lines):
    p = tmp_path / name
    p.write_text("".join(l + "\n" for l in lines), encoding="utf-8")
    return p


def test_load_corpus_unlabeled(tmp_path):
    log = _write(tmp_path, "a.log", [LINE_REPEATED, LINE_INETD, LINE_REPEATED])
    c = load_corpus(log)
    assert len(c) == 3
    assert not c.labeled
    assert all(e.label is None for e in c)


def test_load_corpus_labels(tmp_path):
    log = _write(tmp_path, "a.log", [LINE_REPEATED, LINE_INETD, LINE_REPEATED])
    lab = _write(tmp_path, "a.lab", ["# comment", "2", ""])
    c = load_corpus(log, lab)
    assert [e.label for e in c] == [Label.NORMAL, Label.NORMAL, Label.ANOMALY]


def test_load_corpus_label_out_of_range(tmp_path):
    log = _write(tmp_path, "a.log", [LINE_REPEATED, LINE_INETD, LINE_REPEATED])
    lab = _write(tmp_path, "a.lab", ["99"])
    with pytest.raises(LabelIndexOutOfRange):
        load_corpus(log, lab)


def test_load_corpus_skips_malformed_and_keeps_order(tmp_path, caplog):
    log = _write(tmp_path, "a.log", [LINE_INETD, "junk", LINE_REPEATED])
    lab = _write(tmp_path, "a.lab", ["1"])
    c = load_corpus(log, lab)
    assert [e.index for e in c] == [0, 2]
    assert [s.index for s in c.skipped] == [1]
    assert c.n_lines == 3
    assert "line 2" in caplog.text


def test_load_corpus_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_corpus(tmp_path / "nope.log")


def test_label_file_rejects_junk(tmp_path):
    with pytest.raises(ValueError):
        read_label_indices(_write(tmp_path, "l", ["abc"]))
    with pytest.raises(LabelIndexOutOfRange):
        read_label_indices(_write(tmp_path, "l2", ["-1"]))
