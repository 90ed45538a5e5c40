from flask import Blueprint

bp = Blueprint('errors', __name__)

from app.errors import handlers
from app.errors.exceptions import Condition, ConditionError, ConfigError, ProtocolError, SchemaError
