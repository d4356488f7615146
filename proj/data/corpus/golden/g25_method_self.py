class Greeter:
    def greet(self, name, punctuation):
        return "Hello " + name

    @staticmethod
    def shout(text, times):
        return text.upper()
