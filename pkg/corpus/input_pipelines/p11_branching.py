import tensorflow as tf

base = tf.data.Dataset.from_tensor_slices(items)
base = base.map(parse, num_parallel_calls=8)  # expect: MOB001
train = base.batch(64)
evaluate = base.batch(1)
