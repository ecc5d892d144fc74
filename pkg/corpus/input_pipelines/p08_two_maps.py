import tensorflow as tf

ds = tf.data.Dataset.from_tensor_slices(examples)
ds = ds.map(parse, num_parallel_calls=4)  # expect: MOB001
ds = ds.map(augment, num_parallel_calls=4)  # expect: MOB001
ds = ds.batch(128)
ds = ds.prefetch(1)
