def wrapper(func, *args, **kwargs):
    return func()
