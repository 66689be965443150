#!/usr/bin/env python3
"""
Study Presets Module

Named convergence and alpha-limit studies loaded from a YAML file, so the
reference runs can be repeated with `converge --preset NAME` or
`limit --preset NAME`.
"""

import os
from typing import Any, Dict, List

import yaml


STUDY_KINDS = ('converge', 'limit')


class StudyPresets:
    """Loads and looks up named study presets"""

    def __init__(self, presets_file: str):
        """
        Initialize preset registry

        Args:
            presets_file: Path to YAML preset file
        """
        self.presets_file = presets_file
        self.mapping = None
        self.settings = {}
        self.studies = {}

        self.load_presets()

    def load_presets(self):
        """Load preset definitions from YAML file"""
        if not os.path.exists(self.presets_file):
            raise FileNotFoundError(f"Presets file not found: {self.presets_file}")

        with open(self.presets_file, 'r') as f:
            self.mapping = yaml.safe_load(f) or {}

        self.settings = self.mapping.get('settings', {})
        self.studies = {}
        for name, study in (self.mapping.get('studies') or {}).items():
            kind = study.get('kind')
            if kind not in STUDY_KINDS:
                raise ValueError(f"Preset {name}: kind must be one of {STUDY_KINDS}, got {kind!r}")
            self.studies[name] = study

    def names(self, kind: str = None) -> List[str]:
        return sorted(name for name, study in self.studies.items()
                      if kind is None or study['kind'] == kind)

    def get(self, name: str, kind: str = None) -> Dict[str, Any]:
        """
        Parameters of one preset, with file-wide settings as defaults

        Raises:
            KeyError: unknown preset or preset of another kind
        """
        if name not in self.studies:
            raise KeyError(f"Unknown preset: {name}")
        study = self.studies[name]
        if kind is not None and study['kind'] != kind:
            raise KeyError(f"Preset {name} is a {study['kind']} study, not {kind}")
        params = {key: value for key, value in self.settings.items()}
        params.update(study)
        return params
