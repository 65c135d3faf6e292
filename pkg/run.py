# -*- coding: utf-8 -*-
# MIT License
#
# Copyright (c) 2024 - Present lacmgf contributors
#
# See the LICENSE file distributed with this project for the full text.

from __future__ import annotations

from lacmgf.client import run

if __name__ == "__main__":
    raise SystemExit(run())
