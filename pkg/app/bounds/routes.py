"""HTTP route handlers for the bounds blueprint."""

from flask import current_app, jsonify, request

from . import bp
from app.errors.exceptions import ConditionError
from app.errors.handlers import condition_error
from app.utils import to_jsonable
from .services import constants, grid, rate, tolerance, verify

# small instances only; larger runs belong on the command line
MAX_HTTP_TRIALS = 2000


@bp.errorhandler(ValueError)
def handle_value_error(e):
    return jsonify({"error": str(e)}), 400


# keep diagnostics on ConditionError inside this blueprint
bp.register_error_handler(ConditionError, condition_error)


def _body() -> dict:
    body = request.get_json(silent=True)
    if body is None:
        return {}
    if not isinstance(body, dict):
        raise ValueError("Expected a JSON object body")
    return body


@bp.route('/api/constants', methods=['POST'])
def bound_constants():
    return jsonify(to_jsonable(constants(_body(), current_app.config)))


@bp.route('/api/tolerance', methods=['POST'])
def tolerance_n():
    return jsonify(to_jsonable(tolerance(_body(), current_app.config)))


@bp.route('/api/rate', methods=['POST'])
def convergence_rate():
    return jsonify(to_jsonable(rate(_body(), current_app.config)))


@bp.route('/api/grid', methods=['POST'])
def delta_grid():
    return jsonify(to_jsonable(grid(_body(), current_app.config)))


@bp.route('/api/verify', methods=['POST'])
def verify_mme():
    body = _body()
    if int(body.get('trials') or current_app.config['BANDITS_TRIALS']) > MAX_HTTP_TRIALS:
        raise ValueError(f"At most {MAX_HTTP_TRIALS} trials over HTTP")
    return jsonify(to_jsonable(verify(body, current_app.config)))
