def make_sorter(reverse=False):
    return lambda items: sorted(items, reverse=reverse)


SORTER = make_sorter()
