# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

"""Moment generating functions of lacunary trigonometric sums.

```py
from lacmgf.components import mgfeval, seqgen

seq = seqgen.make_geometric(2, 8)
estimate = mgfeval.mgf(seq, 0.5)
print(estimate.value, estimate.cumulant)
```
"""

from __future__ import annotations

__all__: tuple[str, ...] = ("__version__",)

__version__: str = "0.1.0"
