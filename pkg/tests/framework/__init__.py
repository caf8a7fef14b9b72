# Tests for punkt.framework
