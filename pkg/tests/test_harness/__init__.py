# Harness tests package
