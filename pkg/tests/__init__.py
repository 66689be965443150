"""
Test suite for polyspline fitting, studies and command line
"""
