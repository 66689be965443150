#!/usr/bin/env python3
"""
Unit Tests for Study Presets

Tests loading of the bundled preset file and of ad-hoc YAML files.
"""

import unittest
import sys
import os
import tempfile

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from study_presets import StudyPresets


PRESETS_FILE = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))),
                            'presets', 'studies.yaml')


class TestBundledPresets(unittest.TestCase):
    """Test presets/studies.yaml"""

    def setUp(self):
        self.presets = StudyPresets(PRESETS_FILE)

    def test_names_by_kind(self):
        converge = self.presets.names('converge')
        limit = self.presets.names('limit')
        self.assertIn('k1_sin_t', converge)
        self.assertIn('limit_k2_s_I', limit)
        self.assertFalse(set(converge) & set(limit))
        self.assertEqual(sorted(converge + limit), self.presets.names())

    def test_settings_are_defaults(self):
        params = self.presets.get('k1_sin_t', 'converge')
        self.assertEqual(params['samples'], 100)
        self.assertEqual(params['levels'], [8, 16, 32, 64, 128, 256])
        self.assertEqual(params['order'], 1)

    def test_limit_preset(self):
        params = self.presets.get('limit_hermite', 'limit')
        self.assertEqual(params['alphas'], [0.4, 0.2, 0.1, 0.05])
        self.assertEqual(params['seed'], 1729)

    def test_wrong_kind(self):
        with self.assertRaises(KeyError):
            self.presets.get('k1_sin_t', 'limit')

    def test_unknown(self):
        with self.assertRaises(KeyError):
            self.presets.get('no_such_study')


class TestPresetFiles(unittest.TestCase):
    """Test loading edge cases"""

    def write(self, text):
        handle = tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False)
        handle.write(text)
        handle.close()
        self.addCleanup(os.unlink, handle.name)
        return handle.name

    def test_missing_file(self):
        with self.assertRaises(FileNotFoundError):
            StudyPresets('/nonexistent/studies.yaml')

    def test_empty_file(self):
        presets = StudyPresets(self.write(''))
        self.assertEqual(presets.names(), [])

    def test_bad_kind(self):
        with self.assertRaises(ValueError):
            StudyPresets(self.write('studies:\n  odd:\n    kind: sweep\n'))

    def test_study_overrides_settings(self):
        path = self.write('settings:\n  samples: 100\nstudies:\n  mine:\n    kind: converge\n    samples: 400\n')
        self.assertEqual(StudyPresets(path).get('mine')['samples'], 400)


if __name__ == '__main__':
    unittest.main()
