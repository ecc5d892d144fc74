import tensorflow as tf

inputs = tf.constant([[1.0, 1.0]])
weights = tf.Variable([[1.0], [1.0]])
output = tf.matmul(inputs, weights)

with tf.Session() as sess:
    sess.run(tf.global_variables_initializer())
    for epoch in range(1000):
        sess.run(output)
