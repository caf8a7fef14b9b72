# Test package for punkt
