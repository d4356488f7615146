def sum_digits_product(number):
    total = 0
    product = 1
    for digit in str(number):
        total += int(digit)
        product *= int(digit)
    return total, product
