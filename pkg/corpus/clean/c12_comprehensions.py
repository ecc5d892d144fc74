import tensorflow as tf

data = [1.0, 2.0, 3.0]
tensors = [tf.constant(x) for x in data]
squares = {x: x * x for x in data if (half := x / 2) > 0.4}
