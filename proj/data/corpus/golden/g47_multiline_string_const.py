TEMPLATE = """
Hello {name}
"""
greeting = "hi" + "!"
VERSION = (1, 2)
pi_value = 3.14


def render(name):
    return TEMPLATE.format(name=name) + greeting
