def is_prime(number):
    if number < 2:
        return False
    for k in range(2, number):
        if number % k == 0:
            return False
    return True