"""Initialize data package."""
