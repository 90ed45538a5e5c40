#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
This is a web service for K-medoid clustering and minimum-mean-estimation error bounds.
"""

import os
import sys
import argparse

from flask import Flask

from config import Config, config_by_env


def create_app(config_class=None) -> Flask:
    if config_class is None:
        env = os.getenv('FLASK_ENV', 'production')
        config_class = config_by_env.get(env, Config)
    app = Flask(__name__, instance_relative_config=True)
    app.config.from_object(config_class)
    app.config.from_pyfile('application.py', silent=True)

    app.logger.setLevel(app.config.get('LOG_LEVEL', 'INFO'))

    # Only parse command-line arguments if not running under pytest
    if not app.config.get('TESTING') and not any('pytest' in arg for arg in sys.argv[0:1]):
        parse_args(app)

    from app.main import bp as main_bp
    app.register_blueprint(main_bp)

    from app.medoids import bp as medoids_bp
    app.register_blueprint(medoids_bp, url_prefix='/medoids')

    from app.bounds import bp as bounds_bp
    app.register_blueprint(bounds_bp, url_prefix='/bounds')

    from app.errors import bp as errors_bp
    app.register_blueprint(errors_bp)

    return app


def parse_args(app):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument('--host', default=os.getenv('SERVER_HOST', app.config['SERVER_HOST']),
                        help='Address to listen on')
    parser.add_argument('--port', type=int, default=os.getenv('SERVER_PORT', app.config['SERVER_PORT']),
                        help='Port to listen on (default: 8013)')
    parser.add_argument('--threads', type=int, default=app.config['MEDOIDS_THREADS'],
                        help='Threads for swap evaluation, 0 for all cores')
    parser.add_argument('--seed', type=int, default=app.config['MEDOIDS_SEED'],
                        help='Default seed for requests that do not set one')
    args, _ = parser.parse_known_args()

    app.config['SERVER_HOST'] = args.host
    app.config['SERVER_PORT'] = int(args.port)
    app.config['MEDOIDS_THREADS'] = args.threads
    app.config['MEDOIDS_SEED'] = args.seed
