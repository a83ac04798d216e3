"""
Core domain modules - core/__init__.py
Networks, simulation, causality, structures, knowledge, snapshot and coordination
"""
