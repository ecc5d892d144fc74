import tensorflow as tf

kernel = tf.ones((3, 3))

for step in range(10):
    tf.nn.l2_loss(kernel)  # dlperf: ignore[RNC001]

    tf.nn.relu(kernel)  # expect: RNC001
