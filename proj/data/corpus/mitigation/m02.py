def withdraw(balance, amount):
    if amount <= 0:
        return balance
    if amount > balance:
        raise Exception("insufficient funds")
    return balance - amount
