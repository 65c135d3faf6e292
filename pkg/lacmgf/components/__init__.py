# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

__all__: tuple[str, ...] = ("besselkit", "blockdio", "mgfeval", "seqgen", "asymptotics")

from . import besselkit
from . import blockdio
from . import seqgen
from . import mgfeval
from . import asymptotics
