def series(n):
    terms = []
    term = 1
    for _ in range(n):
        terms.append(term)
        term += term * 2
    return terms
