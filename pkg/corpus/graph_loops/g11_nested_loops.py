import tensorflow as tf

grid = tf.ones((8, 8))

for epoch in range(4):
    for row in range(8):
        tf.reduce_sum(grid)  # expect: RNC001
