#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""WSGI entry point, e.g. ``gunicorn -b 0.0.0.0:8013 wsgi:app``."""

from app import create_app

app = create_app()
