import tensorflow as tf

momentum = 0.9
velocity = tf.zeros((5,))

for it in range(40):
    momentum *= 0.99
    decay = tf.multiply(velocity, momentum)
    steady = tf.sqrt(velocity)  # expect: RNC001
