import tensorflow as tf

ds = tf.data.Dataset.list_files(pattern)
ds = ds.interleave(reader, num_parallel_calls=4)
ds = ds.batch(8)
ds = ds.map(decode)  # expect: DPM001
