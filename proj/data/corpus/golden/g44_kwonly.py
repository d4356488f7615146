def configure(host, *, port=80, verbose=False):
    return f"{host}:{port}"
