import tensorflow.compat.v1 as tf

state = tf.zeros((4,))

for round_id in range(12):
    update = tf.identity(state)  # expect: RNC001
