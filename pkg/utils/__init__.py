"""
Exact toolkit for non-classical polynomial phases over F_p^n.
"""
