# Admin services: logging, observability
