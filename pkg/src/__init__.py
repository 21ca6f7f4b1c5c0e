# RezQu Workbench - memory/qubit/bus architecture simulator
