# Stopping solver package
