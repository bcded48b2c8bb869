"""Field-normalized multidisciplinary rankings of highly cited researchers."""
