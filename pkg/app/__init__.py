"""
Verification engine for the space of complete tetrahedra.
"""
