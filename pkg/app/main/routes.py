from flask import current_app
from . import bp


@bp.route('/')
def index():
    routes = sorted(
        rule.rule for rule in current_app.url_map.iter_rules()
        if rule.endpoint != 'static' and '/api/' in rule.rule
    )
    return {'service': 'medoid_bounds', 'routes': routes}


@bp.route('/health')
def health():
    return {'status': 'ok'}
