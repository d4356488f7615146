def f():
    """Return one.   
    More text.   
    """
    return 1
