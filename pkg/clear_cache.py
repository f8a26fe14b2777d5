#!/usr/bin/env python3
"""Utility script to clear the cache of evaluated candidates"""
import sys
import os

# Add src to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), 'src'))

from src.statelearn.services.cache_service import CacheService

def clear_cache():
    """Clear all cached evaluations"""
    cache_service = CacheService()
    count = cache_service.clear()
    print(f"✓ Cleared {count} cached evaluations from {cache_service.cache_dir}")
    print("Cache has been cleared. The next learn --cache run recomputes every candidate.")

if __name__ == "__main__":
    clear_cache()
