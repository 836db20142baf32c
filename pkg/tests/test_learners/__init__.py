# Learner tests package
