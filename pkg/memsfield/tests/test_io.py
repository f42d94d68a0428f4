import json
import math
import os
import tempfile
import unittest

import numpy as np
import pandas as pd

from memsfield.io import report
from memsfield.io.utils import (FileTypes, detect_data_file_type, json_text, read_data_file, to_plain,
                                write_csv_file, write_json_file)
from memsfield.model import CurveType


class TestUtils(unittest.TestCase):
    def test_to_plain(self):
        record = to_plain({'a': np.float64(1.5), 'b': np.arange(3), 'c': float('nan'), 'd': math.inf,
                           'e': CurveType.TYPE_II, 'f': np.bool_(True)})
        self.assertEqual(record, {'a': 1.5, 'b': [0, 1, 2], 'c': None, 'd': 'inf', 'e': 'TypeII', 'f': True})

    def test_json_text(self):
        text = json_text({'zeta': 1, 'alpha': 2})
        self.assertEqual(json.loads(text)['schema'], 1)
        self.assertLess(text.index('"alpha"'), text.index('"zeta"'))

    def test_files(self):
        with tempfile.TemporaryDirectory() as tmp:
            csv_file = os.path.join(tmp, 'profile.csv')
            json_file = os.path.join(tmp, 'profile.json')
            frame = pd.DataFrame({'r': [0.1, 1.0 / 3.0], 'U': [math.pi / 4, 0.0]})
            write_csv_file(frame, csv_file)
            write_json_file({'lambda': 0.5}, json_file)
            self.assertIs(detect_data_file_type(csv_file), FileTypes.CSV)
            self.assertIs(detect_data_file_type(json_file), FileTypes.JSON)
            pd.testing.assert_frame_equal(read_data_file(csv_file), frame)
            self.assertEqual(read_data_file(json_file), {'schema': 1, 'lambda': 0.5})


class TestReport(unittest.TestCase):
    def test_format_number(self):
        self.assertEqual(report.format_number(7.0 / 12.0), '7/12')
        self.assertEqual(report.format_number(2.0), '2')
        self.assertEqual(report.format_number(math.pi), '3.14159')

    def test_table(self):
        table = report.regime_table([3, 10], [0.5, 1.5, 3.0])
        self.assertEqual(list(table.columns), report.COLUMNS)
        rows = table.set_index(['dim', 'delta'])
        self.assertEqual(rows.loc[(3, 1.5), 'branch'], 'Critical')
        self.assertEqual(rows.loc[(3, 1.5), 'regular'], '(0, 3/2]')
        self.assertEqual(rows.loc[(3, 1.5), 'rupture'], '(0, 3/2)')
        self.assertEqual(rows.loc[(3, 0.5), 'rupture'], 'λ* = 3/2')
        self.assertEqual(rows.loc[(10, 0.5), 'curve_type'], 'TypeI')
        self.assertEqual(rows.loc[(10, 0.5), 'regular'], '(0, 17/2)')
        self.assertEqual(rows.loc[(3, 3.0), 'branch'], 'Fold')
        self.assertTrue(rows.loc[(3, 3.0), 'rupture'].startswith('(0, λ****) with λ**** ≥ '))


if __name__ == '__main__':
    unittest.main()
