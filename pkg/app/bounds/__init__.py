from flask import Blueprint

bp = Blueprint('bounds', __name__)

from app.bounds import routes
