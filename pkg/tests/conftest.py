# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

import numpy as np
import pytest

from lacmgf.std import config as config_


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(0x1ACA)


@pytest.fixture()
def config() -> config_.Config:
    """Defaults only, unaffected by the environment or a local `.env`."""
    return config_.Config()
