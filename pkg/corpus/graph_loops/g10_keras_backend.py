import keras

for batch_id in range(30):
    score = keras.backend.dot(q_matrix, k_matrix)  # expect: RNC001
