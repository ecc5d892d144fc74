from tensorflow import matmul, ones

seed = ones((2, 2))

for attempt in range(3):
    matmul(seed, seed)  # expect: RNC001
