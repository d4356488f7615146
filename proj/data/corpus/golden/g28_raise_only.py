def not_ready(path, mode):
    raise NotImplementedError
