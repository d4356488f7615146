def net_pay(gross, tax_rate, deductions):
    net = gross - gross * tax_rate - deductions
    return net
