# entangle command line integration tests
