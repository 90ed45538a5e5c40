"""HTTP route handlers for the medoids blueprint."""

from flask import current_app, jsonify, request

from . import bp
from app.utils import to_jsonable
from .services import cluster, eccentricity, list_datasets, quality


@bp.errorhandler(ValueError)
def handle_value_error(e):
    return jsonify({"error": str(e)}), 400


def _body() -> dict:
    body = request.get_json(silent=True)
    if not isinstance(body, dict):
        raise ValueError("Expected a JSON object body")
    return body


@bp.route('/api/cluster', methods=['POST'])
def cluster_points():
    return jsonify(to_jsonable(cluster(_body(), current_app.config)))


@bp.route('/api/ecc', methods=['POST'])
def sample_eccentricity():
    return jsonify(to_jsonable(eccentricity(_body(), current_app.config)))


@bp.route('/api/quality', methods=['POST'])
def quality_metrics():
    return jsonify(to_jsonable(quality(_body(), current_app.config)))


@bp.route('/api/datasets', methods=['GET'])
def stored_datasets():
    return {'files': list_datasets(current_app.config)}
