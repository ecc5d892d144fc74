from tensorflow import *

for i in range(3):
    matmul(weights, basis)
