def celsius_to_f(celsius):
    fahrenheit = celsius * 9 / 5 + 32
    return fahrenheit
