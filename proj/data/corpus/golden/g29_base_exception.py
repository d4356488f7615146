def fail(code):
    if code:
        raise BaseException
    raise ValueError(code)
