import tensorflow as tf

parts = []
anchor = tf.zeros((2,))

for i in range(6):
    parts.append(i)
    joined = tf.stack(parts)
    probe = tf.square(anchor)  # expect: RNC001
