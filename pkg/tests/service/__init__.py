# Tests for punkt.service
