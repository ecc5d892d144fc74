import tensorflow as tf

for draw in range(16):
    sample = tf.random.normal((3, 3))
