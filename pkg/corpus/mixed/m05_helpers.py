import tensorflow as tf

anchor = tf.ones((4,))


def attach_probe():
    return tf.nn.l2_loss(anchor)  # expect: RNC001
