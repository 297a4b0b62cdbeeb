import io
import json

import pytest
from hypothesis import given, settings

from helpers import SAT_R_BLOCKS, SAT_R_ROWS, family_tables, sat_r_table, tables
from monotone_mle import (
    BERNOULLI,
    FormatError,
    ObservationTable,
    StructuralError,
    emit_fit,
    fit_nondecreasing,
    fit_nonincreasing,
    load_dataset,
    parse_table,
    write_long,
)
from monotone_mle.tabular import emit_plotdata, emit_report


class TestParseAggregate:
    def test_row_expands_to_binary(self):
        t = parse_table("540,11,4\n", "aggregate")
        assert t.labels == ("540",)
        assert sorted(t.levels[0]) == [0.0] * 7 + [1.0] * 4

    def test_non_numeric_label(self):
        t = parse_table("x,1,0", "aggregate")
        assert t.labels == ("x",) and t.levels == ((0.0,),)

    def test_header_detected(self):
        t = parse_table("score,total,ones\n1,2,1\n2,1,1\n", "aggregate")
        assert t.labels == ("1", "2") and t.counts == (2, 1)

    def test_successes_exceed_total(self):
        with pytest.raises(FormatError, match="successes"):
            parse_table("1,2,3", "aggregate")

    def test_duplicate_level(self):
        with pytest.raises(FormatError):
            parse_table("1,2,1\n1,3,0", "aggregate")

    def test_numeric_labels_out_of_order(self):
        with pytest.raises(FormatError, match="out of order"):
            parse_table("500,2,1\n400,3,0", "aggregate")

    def test_order_column(self):
        t = parse_table("500,2,1,2\n400,3,0,1", "aggregate")
        assert t.labels == ("400", "500") and t.counts == (3, 2)

    def test_order_column_conflict(self):
        with pytest.raises(FormatError):
            parse_table("a,2,1,1\nb,3,0,1", "aggregate")

    @pytest.mark.parametrize("text", ["", "\n\n", "level,total,successes\n"])
    def test_empty(self, text):
        with pytest.raises(StructuralError):
            parse_table(text, "aggregate")

    @pytest.mark.parametrize("text", ["1,2", "1,2,1,0,9", "1,2.5,1", "1,0,0"])
    def test_malformed(self, text):
        with pytest.raises((FormatError, StructuralError)):
            parse_table(text, "aggregate")


class TestParseLong:
    def test_groups_levels(self):
        t = parse_table("a,0.5\na,1.5\nb,2.0", "long")
        assert t.labels == ("a", "b")
        assert t.levels == ((0.5, 1.5), (2.0,))

    def test_non_contiguous_level(self):
        with pytest.raises(FormatError, match="contiguous"):
            parse_table("a,1\nb,2\na,3", "long")

    def test_bad_value(self):
        with pytest.raises(FormatError):
            parse_table("a,1\na,nan", "long")

    def test_order_column_regroups(self):
        t = parse_table("b,2,2\na,1,1\nb,3,2", "long")
        assert t.labels == ("a", "b") and t.levels == ((1.0,), (2.0, 3.0))

    def test_partial_order_column(self):
        with pytest.raises(FormatError):
            parse_table("a,1,1\nb,2", "long")


class TestRoundTrip:
    @settings(max_examples=200, deadline=None)
    @given(family_tables(max_levels=10, max_count=5))
    def test_long_round_trip(self, ft):
        _, table = ft
        buf = io.StringIO()
        write_long(table, buf)
        assert parse_table(buf.getvalue(), "long") == table

    def test_round_trip_keeps_full_precision(self):
        table = ObservationTable([[0.1 + 0.2, 1e-300], [2.0 / 3.0]], ["x", "y"])
        buf = io.StringIO()
        write_long(table, buf)
        assert parse_table(buf.getvalue(), "long") == table

    @settings(max_examples=200, deadline=None)
    @given(tables(BERNOULLI, max_levels=10, max_count=6))
    def test_aggregate_and_long_agree(self, table):
        agg = "\n".join(
            f"{i},{n},{int(s)}" for i, (n, s) in enumerate(zip(table.counts, table.level_sums()))
        )
        long = "\n".join(f"{i},{x}" for i, level in enumerate(table.levels) for x in level)
        a, b = parse_table(agg, "aggregate"), parse_table(long, "long")
        assert fit_nondecreasing(a) == fit_nondecreasing(b)
        assert fit_nonincreasing(a) == fit_nonincreasing(b)


class TestDataset:
    def test_matches_published_table(self):
        t = load_dataset()
        assert t.m == 35 and t.total_count == 152 and sum(t.level_sums()) == 26
        assert t == sat_r_table()
        assert [
            (int(label), n, int(d)) for label, n, d in zip(t.labels, t.counts, t.level_sums())
        ] == SAT_R_ROWS


class TestEmitFit:
    def test_blocks_report(self):
        t = sat_r_table()
        buf = io.StringIO()
        emit_fit(fit_nondecreasing(t), t, buf, family=BERNOULLI)
        lines = buf.getvalue().splitlines()
        assert lines[:3] == [
            "direction,nondecreasing",
            "levels,35",
            "record,first,last,count,sum,value,value_rounded",
        ]
        blocks = [line.split(",") for line in lines if line.startswith("block,")]
        assert [(int(r[1]), int(r[2]), int(r[3]), int(r[4])) for r in blocks] == SAT_R_BLOCKS
        assert blocks[1][5:] == ["0.13043478260869565", "0.1304"]
        assert "total,330,800,152,26,0.17105263157894737,0.1711" in lines
        assert lines[-1] == "loglik,bernoulli,-61.35242774889403"

    def test_single_level(self):
        t = ObservationTable([[1, 0, 0, 1]], ["only"])
        buf = io.StringIO()
        emit_fit(fit_nondecreasing(t), t, buf)
        blocks = [line for line in buf.getvalue().splitlines() if line.startswith("block,")]
        assert blocks == ["block,only,only,4,2,0.5,0.5000"]

    def test_plotdata_rows(self):
        t = sat_r_table()
        buf = io.StringIO()
        emit_fit(fit_nondecreasing(t), t, buf, emit="plotdata")
        rows = buf.getvalue().splitlines()
        assert rows[0] == "label,observed_mean,fitted_phi"
        assert len(rows) - 1 == 35
        assert rows[8] == "450,0.66666666666666663,0.13043478260869565"

    def test_phi_rows(self):
        t = sat_r_table()
        buf = io.StringIO()
        emit_fit(fit_nonincreasing(t), t, buf, emit="phi")
        rows = buf.getvalue().splitlines()[1:]
        assert len(rows) == 35 and all(r.endswith(",0.17105263157894737") for r in rows)

    def test_json(self):
        t = sat_r_table()
        buf = io.StringIO()
        emit_fit(fit_nondecreasing(t), t, buf, family=BERNOULLI, as_json=True)
        record = json.loads(buf.getvalue())
        assert {"blocks", "phi", "loglik", "direction"} <= record.keys()
        assert len(record["blocks"]) == 8 and len(record["phi"]) == 35
        assert record["loglik"] == -61.35242774889403

    def test_json_zero_likelihood(self):
        # fitted to a different table with the same counts: phi = (0, 1)
        est = fit_nondecreasing(ObservationTable([[0], [1]]))
        buf = io.StringIO()
        emit_fit(est, ObservationTable([[1], [0]]), buf, family=BERNOULLI, as_json=True)
        assert json.loads(buf.getvalue())["loglik"] == "-inf"

    def test_mismatch(self):
        with pytest.raises(StructuralError):
            emit_plotdata(fit_nondecreasing(sat_r_table()), ObservationTable([[1]]), io.StringIO())
        other = ObservationTable([[0, 1]] * 35)
        with pytest.raises(StructuralError):
            emit_fit(fit_nondecreasing(sat_r_table()), other, io.StringIO())


def test_emit_report_is_stable():
    summary = {"statistic": "delta", "refit": False, "observed": 1.0, "quantile_rank": 0.9899}
    buf = io.StringIO()
    emit_report(summary, buf)
    assert buf.getvalue() == "statistic,delta\nrefit,false\nobserved,1\nquantile_rank,0.9899\n"
