from flask import jsonify
from . import bp
from .exceptions import ConditionError


@bp.app_errorhandler(ConditionError)
def condition_error(error):
    return jsonify({
        'error': str(error),
        'diagnostics': [c.to_dict() for c in error.diagnostics],
    }), 400


@bp.app_errorhandler(404)
def not_found_error(error):
    return jsonify({'error': 'not found'}), 404


@bp.app_errorhandler(500)
def internal_error(error):
    return jsonify({'error': 'internal server error'}), 500
