def invoice(quantity, unit, fee):
    line_total = quantity * unit + fee
    return line_total
