def cost(items, shipping):
    subtotal = 0
    for name, price in items:
        subtotal += price
    return subtotal + shipping * 1
