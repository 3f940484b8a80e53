"""
End-to-end tests of the hoising command line
"""
import io
import json

import pandas as pd
import pytest

import app
from modules import batch_runner
from modules.estimators import DivergenceError
from modules.formula_io import parse
from utils.constants import BENCH_COLUMNS, STATS_COLUMNS, TRACE_COLUMNS


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def read_table(text):
    return pd.read_csv(io.StringIO(text), comment='#')


class TestUsage:
    def test_missing_command(self):
        assert app.main([]) == 2

    def test_missing_required_option(self):
        assert app.main(['expand', '--arity', '3']) == 2


class TestExpand:
    def test_cardinality_two_of_four(self, capsys):
        assert app.main(['expand', '--card', '2', '--arity', '4']) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "card>=2 over 4 literals (degree-indexed, 5 coefficients)"
        exact = [line.split()[1] for line in lines[2:]]
        assert exact == ['-3/8', '3/8', '1/8', '-1/8', '-3/8']

    def test_clause_as_json(self, capsys):
        assert app.main(['expand', '--clause', '--arity', '2', '--json']) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload['variant'] == 'symmetric'
        assert [row['exact'] for row in payload['coefficients']] == ['-1/2', '1/2', '1/2']

    def test_negated_literal_switches_to_subsets(self, capsys):
        assert app.main(['expand', '--xor', '--arity', '2', '--negate', '2', '--json']) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload['variant'] == 'general'
        assert [row['decimal'] for row in payload['coefficients']] == [-1.0]

    def test_invalid_threshold(self):
        assert app.main(['expand', '--card', '5', '--arity', '4']) == 2
        assert app.main(['expand', '--xor', '--arity', '2', '--negate', '3']) == 2


class TestSolve:
    def test_single_clause_is_solved(self, tmp_path, capsys):
        path = write(tmp_path, "one.hyb", "p hybrid 1 1\ncnf 1 0\n")
        code = app.main(['solve', path, '--trials', '4', '--steps', '50', '--seed', '0'])
        report = json.loads(capsys.readouterr().out)
        assert code == 0
        assert report['successes'] == 4
        assert report['best']['satisfying']
        assert report['best']['literals'] == [1]
        assert report['ground_energy'] == -1.0

    def test_contradiction_fails(self, tmp_path, capsys):
        path = write(tmp_path, "bad.hyb", "p hybrid 1 2\ncnf 1 0\ncnf -1 0\n")
        assert app.main(['solve', path, '--trials', '2', '--steps', '20', '--seed', '1']) == 1
        report = json.loads(capsys.readouterr().out)
        assert report['successes'] == 0
        assert not report['best']['satisfying']

    def test_malformed_file(self, tmp_path, capsys):
        path = write(tmp_path, "broken.hyb", "p hybrid 2 1\nxor 1 2\n")
        assert app.main(['solve', path, '--seed', '0']) == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert app.main(['solve', str(tmp_path / "absent.hyb"), '--seed', '0']) == 2

    def test_aborted_trials_give_valid_json(self, tmp_path, capsys, monkeypatch):
        def diverge(*args, **kwargs):
            raise DivergenceError("Objective is not finite")

        monkeypatch.setattr(batch_runner, 'run_trials', diverge)
        path = write(tmp_path, "one.hyb", "p hybrid 2 1\nxor 1 2 0\n")
        assert app.main(['solve', path, '--trials', '2', '--steps', '5', '--seed', '0', '--all-trials']) == 1
        text = capsys.readouterr().out
        assert "NaN" not in text
        report = json.loads(text)
        assert report['aborted'] == 2
        assert report['best'] is None
        assert [r['final_energy'] for r in report['trial_results']] == [None, None]

    def test_output_file(self, tmp_path, capsys):
        path = write(tmp_path, "one.hyb", "p hybrid 2 1\nxor 1 2 0\n")
        out = tmp_path / "report.json"
        app.main(['solve', path, '--relaxation', 'type3', '--trials', '3', '--steps', '100',
                  '--seed', '2', '--all-trials', '-o', str(out)])
        report = json.loads(out.read_text(encoding='utf-8'))
        assert report['relaxation'] == 'type3'
        assert len(report['trial_results']) == 3
        assert report['targets']['target'] == -2.0 - 2


class TestTrace:
    def test_csv_columns_and_length(self, capsys):
        assert app.main(['trace', '--init', '0.4,-0.3', '--steps', '20', '--seed', '0']) == 0
        out = capsys.readouterr().out
        assert out.startswith("# schema: hoising-trace v1\n")
        df = read_table(out)
        assert list(df.columns) == TRACE_COLUMNS
        assert list(df['step']) == list(range(21))
        assert df['a1'].iloc[0] == pytest.approx(0.4)
        assert df['grad1'].iloc[0] == pytest.approx(-0.3)

    def test_bad_init(self):
        assert app.main(['trace', '--init', '0.1,0.2,0.3', '--seed', '0']) == 2
        assert app.main(['trace', '--init', '2,0', '--seed', '0']) == 2


class TestGeneratePle:
    def test_instance_to_stdout(self, capsys):
        assert app.main(['generate-ple', '--n', '4', '--seed', '7']) == 0
        f = parse(capsys.readouterr().out)
        assert f.n == 12
        assert f.num_constraints == 9

    def test_files_with_planted_assignment(self, tmp_path):
        out = tmp_path / "ple"
        assert app.main(['generate-ple', '--n', '4', '--count', '2', '--seed', '3',
                         '--output-dir', str(out), '--planted']) == 0
        names = sorted(p.name for p in out.iterdir())
        assert names == ['ple_n4_s3.hyb', 'ple_n4_s3.sol', 'ple_n4_s4.hyb', 'ple_n4_s4.sol']
        planted = (out / 'ple_n4_s3.sol').read_text(encoding='utf-8').split()
        assert planted[0] == 'v' and planted[-1] == '0'
        assert len(planted) == 12 + 2

    def test_count_needs_directory(self):
        assert app.main(['generate-ple', '--n', '4', '--count', '2', '--seed', '0']) == 2


class TestBench:
    def test_encoding_sizes(self, capsys):
        assert app.main(['bench', '--stats', '--n', '8,16,32,64', '--seed', '1']) == 0
        df = read_table(capsys.readouterr().out)
        assert list(df.columns) == STATS_COLUMNS
        assert list(zip(df['num_spins'], df['num_edges'])) == [(24, 17), (48, 33), (96, 65), (192, 129)]

    def test_same_seed_same_table(self, tmp_path):
        options = ['bench', '--n', '4', '--instances', '2', '--trials', '2', '--steps', '15',
                   '--relaxations', 'type1,type3', '--seed', '5']
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        summary = tmp_path / "summary.json"
        assert app.main(options + ['-o', str(first), '--summary', str(summary)]) == 0
        assert app.main(options + ['-o', str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

        df = read_table(first.read_text(encoding='utf-8'))
        assert list(df.columns) == BENCH_COLUMNS
        assert len(df) == 2 * 15
        assert set(df['relaxation']) == {'type1', 'type3'}
        payload = json.loads(summary.read_text(encoding='utf-8'))
        assert payload['seed'] == 5
        assert len(payload['configurations']) == 2

    def test_moreau_size_limit(self):
        assert app.main(['bench', '--n', '64', '--gradients', 'moreau', '--seed', '0']) == 2

    def test_unknown_relaxation(self):
        assert app.main(['bench', '--n', '4', '--relaxations', 'type9', '--seed', '0']) == 2
