"""Grid diagrams of cables built from block presentations of braided knots."""
