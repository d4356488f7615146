def balance(deposits, withdrawals):
    money = 0
    for d in deposits:
        money += d
    for w in withdrawals:
        money -= w
    return money
