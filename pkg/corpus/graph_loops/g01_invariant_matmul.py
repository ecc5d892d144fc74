import tensorflow as tf

a = tf.constant([[1.0, 2.0]])
b = tf.constant([[3.0], [4.0]])

for step in range(100):
    prod = tf.matmul(a, b)  # expect: RNC001
