def copy_file(src, dst):
    with open(src, "rb") as reader, open(dst, "wb") as writer:
        writer.write(reader.read())
