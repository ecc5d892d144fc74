import tensorflow as tf

ds = tf.data.Dataset.from_tensor_slices(rows)
ds = ds.batch(32)
ds = ds.map(vectorized_fn)  # expect: DPM001
