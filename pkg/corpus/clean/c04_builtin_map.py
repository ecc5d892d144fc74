names = ["a", "b", "c"]
lengths = list(map(len, names))
doubled = [x * 2 for x in lengths]
