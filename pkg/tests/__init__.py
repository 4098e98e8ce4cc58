# entangle Tests Package
