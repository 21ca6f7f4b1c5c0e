# Workbench module
