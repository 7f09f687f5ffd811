# Runtime benchmark package
