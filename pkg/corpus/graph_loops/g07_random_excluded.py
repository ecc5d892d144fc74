import tensorflow as tf

shape = (3, 3)

for trial in range(5):
    noise = tf.random.uniform(shape)
    mask = tf.ones(shape)  # expect: RNC001
