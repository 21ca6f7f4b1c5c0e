# MOVE design module
