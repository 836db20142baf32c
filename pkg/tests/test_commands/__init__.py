# Command tests
