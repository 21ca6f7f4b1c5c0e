# Tunneling measurement module
