"""
Tests for PLE generation, the formula text format, encoding statistics,
validation and exporters
"""
import json
from fractions import Fraction

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from models.constraint import Constraint, ConstraintKind
from models.formula import HybridFormula, PleSpec, WeightedConstraint
from models.ising import Relaxation
from models.run_config import GradientKind, GradientProvider, RunConfig
from models.validation import MOREAU_SPIN_LIMIT, get_formula_report, moreau_cost, validate_formula, validate_run_config
from modules.formula_io import FormulaParseError, parse, read_formula, serialize, write_formula
from modules.hamiltonian import ground_energy, hamiltonian, is_satisfying
from modules.model_builder import encoding_stats, to_model
from modules.ple_generator import generate_ple, generate_ple_batch
from utils.constants import SPIN_TRUE, TRACE_COLUMNS, TRACE_SCHEMA
from utils.exporters import csv_text, export_to_csv, json_text

KINDS = [ConstraintKind.XOR, ConstraintKind.CARD_GE, ConstraintKind.CLAUSE]


def random_formula(rng: np.random.Generator) -> HybridFormula:
    n = int(rng.integers(1, 15))
    constraints = []
    for _ in range(int(rng.integers(0, 10))):
        d = int(rng.integers(1, n + 1))
        kind = KINDS[rng.integers(3)]
        variables = rng.permutation(np.arange(1, n + 1))[:d]
        literals = [int(v) * int(rng.choice([-1, 1])) for v in variables]
        threshold = int(rng.integers(0, d + 1)) if kind == ConstraintKind.CARD_GE else None
        weight = [None, 1.0, 2.5, 7.0][rng.integers(4)]
        constraints.append(WeightedConstraint(
            constraint=Constraint.from_dimacs(kind, literals, threshold=threshold),
            weight=weight,
        ))
    return HybridFormula(n=n, constraints=constraints, comments=["random formula"])


def canonical(f: HybridFormula):
    return (f.n, [(item.constraint.canonical(), item.weight) for item in f.constraints], f.comments)


class TestPleGenerator:
    def test_planted_assignment_satisfies(self):
        for inst in generate_ple_batch(8, 10, seed=0):
            m = to_model(inst.formula)
            planted = np.asarray(inst.planted)
            assert is_satisfying(m, planted)
            assert hamiltonian(m, planted) == pytest.approx(ground_energy(m))

    def test_default_shape(self):
        inst = generate_ple(PleSpec(n_parity_bits=8, seed=3))
        assert inst.spec.m == 16
        assert inst.spec.num_flips == 8
        assert len(inst.flipped) == 8
        assert inst.planted[8:].count(SPIN_TRUE) == 8
        xors = [item.constraint for item in inst.formula.constraints[:-1]]
        assert all(c.kind == ConstraintKind.XOR for c in xors)
        card = inst.formula.constraints[-1].constraint
        assert card.kind == ConstraintKind.CARD_GE
        assert card.threshold == 8
        assert card.signs == (-1,) * 16

    @pytest.mark.parametrize("n, spins, edges", [(8, 24, 17), (16, 48, 33), (32, 96, 65), (64, 192, 129)])
    def test_encoding_sizes(self, n, spins, edges):
        stats = encoding_stats(generate_ple(PleSpec(n_parity_bits=n, seed=0)).formula)
        assert (stats.num_spins, stats.num_edges) == (spins, edges)
        assert stats.max_arity == 2 * n

    def test_same_seed_same_instance(self):
        first = serialize(generate_ple(PleSpec(n_parity_bits=12, seed=42)).formula)
        second = serialize(generate_ple(PleSpec(n_parity_bits=12, seed=42)).formula)
        other = serialize(generate_ple(PleSpec(n_parity_bits=12, seed=43)).formula)
        assert first == second
        assert first != other

    def test_batch_seeds_are_consecutive(self):
        batch = generate_ple_batch(6, 3, seed=10)
        assert [inst.spec.seed for inst in batch] == [10, 11, 12]
        assert serialize(batch[2].formula) == serialize(generate_ple(PleSpec(n_parity_bits=6, seed=12)).formula)

    def test_error_rate_and_sample_count(self):
        spec = PleSpec(n_parity_bits=4, m=10, e="1/4", seed=0)
        assert spec.e == Fraction(1, 4)
        assert spec.num_flips == 2
        inst = generate_ple(spec)
        assert inst.formula.n == 14
        assert len(inst.flipped) == 2
        assert inst.formula.constraints[-1].constraint.threshold == 8
        with pytest.raises(ValidationError):
            PleSpec(n_parity_bits=4, e=1, seed=0)


class TestFormulaText:
    def test_round_trip_on_random_formulas(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            f = random_formula(rng)
            text = serialize(f)
            again = parse(text)
            assert canonical(again) == canonical(f)
            assert serialize(again) == text

    def test_generated_instance_is_byte_identical(self):
        text = serialize(generate_ple(PleSpec(n_parity_bits=8, seed=1)).formula)
        assert serialize(parse(text)) == text
        assert "\r" not in text

    def test_canonical_layout(self):
        text = "c demo\np hybrid 3 2\nw 2.5 card 2  3 -1 2 0\n\nxor -2 1 0\n"
        assert serialize(parse(text)) == "c demo\np hybrid 3 2\nw 2.5 card 2 -1 2 3 0\nxor 1 -2 0\n"

    @pytest.mark.parametrize("text, line", [
        ("p hybrid x 1\nxor 1 0\n", 1),
        ("c ok\np cnf 2 1\nxor 1 0\n", 2),
        ("p hybrid 2 1\nand 1 2 0\n", 2),
        ("p hybrid 2 1\nxor 1 3 0\n", 2),
        ("p hybrid 2 1\nxor 1 2\n", 2),
        ("p hybrid 2 1\nw 0 xor 1 2 0\n", 2),
        ("p hybrid 2 1\nw -1.5 cnf 1 0\n", 2),
        ("p hybrid 2 2\nxor 1 2 0\n\ncard 3 1 2 0\n", 4),
        ("xor 1 2 0\n", 1),
        ("p hybrid 2 2\nxor 1 2 0\n", 2),
    ])
    def test_malformed_input_reports_line(self, text, line):
        with pytest.raises(FormulaParseError) as info:
            parse(text)
        assert info.value.line_number == line
        assert str(info.value).startswith(f"line {line}:")

    @pytest.mark.parametrize("token", ["inf", "nan", "-inf"])
    def test_weight_must_be_finite(self, token):
        with pytest.raises(FormulaParseError) as info:
            parse(f"p hybrid 2 1\nw {token} xor 1 2 0\n")
        assert info.value.line_number == 2
        assert "weight must be finite" in str(info.value)

    def test_non_positive_weight_message(self):
        with pytest.raises(FormulaParseError, match="non-positive weight"):
            parse("p hybrid 2 1\nw -2 xor 1 2 0\n")

    def test_file_io(self, tmp_path):
        f = generate_ple(PleSpec(n_parity_bits=4, seed=2)).formula
        path = tmp_path / "inst.hyb"
        write_formula(f, str(path))
        assert canonical(read_formula(str(path))) == canonical(f)
        assert path.read_bytes().count(b"\r\n") == 0


class TestEncodingStats:
    def test_counts(self):
        f = parse("p hybrid 4 3\ncard 2 1 2 3 4 0\nxor 1 2 0\ncnf -3 0\n")
        stats = encoding_stats(f)
        assert stats.arity_histogram == {1: 1, 2: 1, 4: 1}
        assert stats.fourier_terms == 5 + 3 + 2
        assert stats.to_dict()['arity_histogram'] == {'1': 1, '2': 1, '4': 1}

    def test_general_tables_count_nonzero_terms(self):
        c = Constraint.from_dimacs(ConstraintKind.TRUTH_TABLE, [1, 2], table=[1, 1, 1, -1])
        f = HybridFormula(n=2, constraints=[WeightedConstraint(constraint=c)])
        assert encoding_stats(f).fourier_terms == 4


class TestValidation:
    def test_formula(self):
        ok, errors = validate_formula(HybridFormula(n=0))
        assert not ok
        assert len(errors) == 2
        assert validate_formula(parse("p hybrid 1 1\ncnf 1 0\n")) == (True, [])

    def test_formula_report(self):
        report = get_formula_report(parse("p hybrid 4 2\ncard 0 1 2 0\nxor 1 2 0\n"))
        assert report['kinds'] == {'card': 1, 'xor': 1}
        assert report['unused_variables'] == 2
        assert len(report['issues']) == 2

    def test_moreau_size_limit(self):
        cfg = RunConfig(provider=GradientProvider(kind=GradientKind.MOREAU), seed=0)
        assert validate_run_config(cfg, MOREAU_SPIN_LIMIT)[0]
        ok, errors = validate_run_config(cfg, MOREAU_SPIN_LIMIT + 1)
        assert not ok
        assert "--force" in errors[0]
        assert validate_run_config(cfg, MOREAU_SPIN_LIMIT + 1, force=True)[0]
        assert validate_run_config(RunConfig(seed=0), 10 ** 6)[0]
        assert moreau_cost(24, 10, 100) == 24000

    def test_run_config_needs_a_seed(self):
        with pytest.raises(ValidationError):
            RunConfig(relaxation=Relaxation.TYPE_II)


class TestExporters:
    def test_csv_schema_line_and_column_order(self, tmp_path):
        df = pd.DataFrame({'grad2': [0.5], 'step': [0], 'a1': [0.1], 'a2': [0.2], 'objective': [-1.0], 'grad1': [0.3]})
        text = csv_text(df, TRACE_SCHEMA, TRACE_COLUMNS)
        lines = text.split("\n")
        assert lines[0] == "# schema: hoising-trace v1"
        assert lines[1] == ",".join(TRACE_COLUMNS)
        assert "\r" not in text

        path = tmp_path / "trace.csv"
        export_to_csv(df, TRACE_SCHEMA, TRACE_COLUMNS, str(path))
        back = pd.read_csv(path, comment='#')
        assert list(back.columns) == TRACE_COLUMNS
        assert back['objective'].iloc[0] == -1.0

    def test_json_handles_numpy(self):
        text = json_text({'b': np.int64(3), 'a': np.array([1.5, 2.0])})
        assert text.index('"a"') < text.index('"b"')
        assert '"b": 3' in text

    def test_json_writes_non_finite_values_as_null(self):
        payload = {'energy': float('nan'), 'rates': [1.0, float('inf')], 'grid': np.array([np.nan, 0.5])}
        back = json.loads(json_text(payload))
        assert back == {'energy': None, 'rates': [1.0, None], 'grid': [None, 0.5]}
        assert "NaN" not in json_text(payload)
