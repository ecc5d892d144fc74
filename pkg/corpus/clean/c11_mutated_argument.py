import tensorflow as tf

parts = []

for i in range(6):
    parts.append(i)
    stacked = tf.stack(parts)
