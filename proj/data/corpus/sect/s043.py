def discount(price, percent):
    reduction = price * percent / 100
    final = price - reduction
    return final
