import tensorflow as tf

features = tf.ones((4, 4))
total = 0

while total < 10:
    total += 1
    tf.reduce_mean(features)  # expect: RNC001
