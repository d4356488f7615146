def accumulate_squares(limit):
    squares = 0
    number = 1
    while number <= limit:
        squares += number ** 2
        number += 1
    return squares
