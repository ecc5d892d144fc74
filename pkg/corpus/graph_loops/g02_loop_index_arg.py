import tensorflow as tf

rows = tf.constant([[1.0], [2.0]])
bias = tf.constant([0.5])

for i in range(8):
    tf.matmul(rows, weights[i])
    tf.nn.bias_add(acc, bias)  # expect: RNC001
