import tensorflow as tf

ds = tf.data.TextLineDataset(files)
ds = ds.map(decode, num_parallel_calls=tf.data.AUTOTUNE)  # expect: MOB001
ds = ds.batch(16)
