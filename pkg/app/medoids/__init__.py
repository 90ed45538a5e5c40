from flask import Blueprint

bp = Blueprint('medoids', __name__)

from app.medoids import routes
