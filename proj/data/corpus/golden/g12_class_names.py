class data_loader:
    def load(self, path):
        with open(path, encoding="utf-8") as handle:
            return handle.read()


class HTTPClient:
    def get(self, url):
        return url
