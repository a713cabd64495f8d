from .app import ORIGIN_HEADER, create_app
from .ratelimit import API_KEY_HEADER, RateLimiter

__all__ = ["ORIGIN_HEADER", "create_app", "API_KEY_HEADER", "RateLimiter"]
