# Processor modules
