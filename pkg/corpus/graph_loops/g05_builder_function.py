import tensorflow as tf

base = tf.ones((2, 2))
scale = tf.constant(3.0)


def scaled_product():
    return tf.multiply(base, scale)  # expect: RNC001


for step in range(20):
    scaled_product()
